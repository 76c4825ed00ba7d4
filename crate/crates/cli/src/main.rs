use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use projlab::acceptance::{criterion_12, run_suite};
use projlab::budget::Budget;
use projlab::error::LabError;
use projlab::exact::{decimal_string, Exponent};
use projlab::families::{
    family_from_directions, hyperplane_intersection_max, sample_random_family,
    size_concentration_report, spread_containing, spread_perp, RandomFamilyConfig,
};
use projlab::field::{gaussian_binomial, AmbientSpace};
use projlab::fourier::{dft, plancherel_defect_of};
use projlab::grassmannian::{enumerate_subspaces, Subspace};
use projlab::pointsets::{
    circle_set, load_point_set, moment_curve_set, random_point_set, PointSet,
};
use projlab::projection::{cauchy_schwarz_gap, project, Fibers};
use projlab::report::{run_sweep, ExperimentConfig, FamilySpec, SetSpec, Threshold, ThresholdKind};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "projlab", version, about = "Projection experiments over F_p^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Largest p^n that may be materialised.
    #[arg(long, default_value_t = Budget::default().max_points)]
    max_points: u64,
    /// Largest Grassmannian that may be enumerated.
    #[arg(long, default_value_t = Budget::default().max_subspaces)]
    max_subspaces: u64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            max_points: self.max_points,
            max_subspaces: self.max_subspaces,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian binomial |G(n,k)| by formula and by enumeration.
    Count {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Project a point set along a subspace.
    Project {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        /// Basis rows, e.g. "1,0,2;0,1,1".
        #[arg(long)]
        w: String,
        /// Points, e.g. "0,0;1,0;1,1".
        #[arg(long, conflicts_with = "set")]
        points: Option<String>,
        /// Point-set file.
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Plancherel and coset-energy identity over every W in G(n, n-m).
    IdentityCheck {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Add one trial with E = F_p^n.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Sample a random family with δ = p^α / |G(n, n-m)|.
    RandomFamily {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Rational exponent, e.g. 3/2 or 1.25.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also report size concentration over seeds 0..K.
        #[arg(long)]
        seeds: Option<u64>,
        /// Write the family file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// The explicit circle and moment-curve families.
    Examples {
        which: Example,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run an experiment config and write the CSV report.
    Sweep {
        config: PathBuf,
        /// Overrides the config's output path; "-" for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_points: Option<u64>,
        #[arg(long)]
        max_subspaces: Option<u64>,
    },
    /// Run the acceptance suite and write its CSV artifacts.
    Accept {
        #[arg(long, default_value = "acceptance-out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Circle,
    Moment,
}

enum Failure {
    Lab(LabError),
    Check(String),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lab(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Lab(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_USAGE
            })
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Count { p, n, k, budget } => count(p, n, k, budget.budget()),
        Command::Project {
            p,
            n,
            w,
            points,
            set,
        } => project_cmd(p, n, &w, points, set),
        Command::IdentityCheck {
            p,
            n,
            m,
            trials,
            seed,
            tol,
            full,
            out,
            budget,
        } => identity_check(p, n, m, trials, seed, tol, full, out, budget.budget()),
        Command::RandomFamily {
            p,
            n,
            m,
            alpha,
            seed,
            seeds,
            out,
            budget,
        } => random_family(p, n, m, &alpha, seed, seeds, out, budget.budget()),
        Command::Examples {
            which,
            p,
            n,
            budget,
        } => examples(which, p, n, budget.budget()),
        Command::Sweep {
            config,
            out,
            max_points,
            max_subspaces,
        } => sweep(&config, out, max_points, max_subspaces),
        Command::Accept { out } => accept(&out),
    }
}

fn count(p: u32, n: usize, k: usize, budget: Budget) -> Outcome {
    let a = AmbientSpace::new(p, n)?;
    let formula = gaussian_binomial(n, k, p)?;
    println!("formula {formula}");
    let subs = match enumerate_subspaces(a, k, &budget) {
        Ok(s) => s,
        Err(e) if e.is_budget() => {
            println!("enumerated skipped (budget)");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    println!("enumerated {}", subs.len());
    if subs.len() as u64 != formula {
        return Err(Failure::Check(format!(
            "enumeration found {} subspaces, formula gives {formula}",
            subs.len()
        )));
    }
    Ok(())
}

fn parse_points(a: AmbientSpace, text: &str) -> Result<PointSet, LabError> {
    let mut body = format!("p={},n={}\n", a.p(), a.n());
    for pt in text.split(';').filter(|s| !s.trim().is_empty()) {
        body.push_str(pt.trim());
        body.push('\n');
    }
    PointSet::parse(&body, Some(a))
}

fn project_cmd(p: u32, n: usize, w: &str, points: Option<String>, set: Option<PathBuf>) -> Outcome {
    let a = AmbientSpace::new(p, n)?;
    let w = Subspace::parse(a, w)?;
    let e = match (points, set) {
        (Some(text), _) => parse_points(a, &text)?,
        (None, Some(path)) => load_point_set(&path, Some(a))?,
        (None, None) => PointSet::empty(a)?,
    };
    let image = project(&e, &w)?;
    let fibers = Fibers::new(&e, &w)?;
    let gap = cauchy_schwarz_gap(&e, &w)?;
    println!("subspace {w}");
    println!("set_size {}", e.len());
    println!("image_size {}", image.len());
    for label in image.labels() {
        let rep = a.decode(label.representative)?;
        println!("coset {rep}");
    }
    println!("energy {}", fibers.energy());
    println!("cauchy_schwarz {} <= {}", gap.lhs, gap.rhs);
    if !gap.holds() {
        return Err(Failure::Check("Cauchy-Schwarz inequality violated".into()));
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)?,
        _ => print!("{text}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn identity_check(
    p: u32,
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
    tol: f64,
    full: bool,
    out: Option<PathBuf>,
    budget: Budget,
) -> Outcome {
    let a = AmbientSpace::new(p, n)?;
    if m == 0 || m >= n {
        return Err(LabError::CodimensionOutOfRange { m, n }.into());
    }
    let planes = enumerate_subspaces(a, n - m, &budget)?;
    let mut csv = String::from("trial,set_size,check,subspace,spatial,spectral,rel_defect,pass\n");
    let mut failures = 0usize;
    let mut sets = Vec::new();
    for t in 0..trials {
        let s = seed.wrapping_add(t);
        let size = 1 + projlab::families::unit_draw(s, t) % a.point_count();
        sets.push((t.to_string(), random_point_set(a, size, s)?));
    }
    if full {
        sets.push(("full".to_string(), PointSet::full(a)?));
    }
    for (trial, e) in &sets {
        let table = dft(e, &budget)?;
        let expected = a.point_count() as f64 * e.len() as f64;
        let rel = plancherel_defect_of(&table, e) / expected.max(1.0);
        let ok = rel <= tol;
        failures += usize::from(!ok);
        writeln!(
            csv,
            "{trial},{},plancherel,,{},{:.6},{rel:.3e},{ok}",
            e.len(),
            a.point_count() * e.len(),
            table.total_power()
        )
        .unwrap();
        for w in &planes {
            let r = table.verify_coset_identity(e, w, tol)?;
            failures += usize::from(!r.pass);
            writeln!(
                csv,
                "{trial},{},identity,\"{w}\",{},{:.6},{:.3e},{}",
                e.len(),
                r.spatial,
                r.spectral,
                r.defect() / (r.spatial as f64).max(1.0),
                r.pass
            )
            .unwrap();
        }
    }
    emit(out.as_deref(), &csv)?;
    if failures > 0 {
        return Err(Failure::Check(format!(
            "{failures} checks above tol {tol:e}"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn random_family(
    p: u32,
    n: usize,
    m: usize,
    alpha: &str,
    seed: u64,
    seeds: Option<u64>,
    out: Option<PathBuf>,
    budget: Budget,
) -> Outcome {
    let a = AmbientSpace::new(p, n)?;
    let alpha: Exponent = alpha.parse()?;
    let cfg = RandomFamilyConfig::new(a, m, alpha.check_denominator()?, seed)?;
    let g = sample_random_family(&cfg, &budget)?;
    println!("grassmannian_size {}", cfg.grassmannian_size());
    println!("expected_size {:.6}", cfg.expected_size());
    println!("family_size {}", g.len());
    println!("spread_containing {}", spread_containing(&g).max_count);
    println!("spread_perp {}", spread_perp(&g).max_count);
    if let Some(k) = seeds {
        let list: Vec<u64> = (0..k).collect();
        let rep = size_concentration_report(&cfg, &list, &budget)?;
        println!(
            "concentration {} of {k} seeds deviate by more than p^alpha/2 (fraction {:.4}, chebyshev {:.4})",
            rep.deviating, rep.fraction, rep.chebyshev
        );
    }
    if let Some(path) = out {
        projlab::families::save_family(&g, &path)?;
    }
    Ok(())
}

fn examples(which: Example, p: u32, n: usize, budget: Budget) -> Outcome {
    let (set, m, spec) = match which {
        Example::Circle => (circle_set(p)?, 2, FamilySpec::Circle),
        Example::Moment => (moment_curve_set(p, n)?, n - 1, FamilySpec::Moment),
    };
    let a = set.ambient();
    let g = family_from_directions(&set)?;
    println!("family_size {}", g.len());
    println!("spread_perp {}", spread_perp(&g).max_count);
    if let Example::Moment = which {
        println!(
            "hyperplane_max {}",
            hyperplane_intersection_max(&set, &budget)?
        );
    }
    let mut cfg = ExperimentConfig::new(a, m)?;
    cfg.budget = budget;
    cfg.families = vec![spec];
    cfg.sets = [2u64, 5, 13, 34, 89]
        .iter()
        .enumerate()
        .map(|(i, &s)| SetSpec::Random {
            size: s.min(a.point_count()),
            seed: i as u64 + 1,
        })
        .collect();
    cfg.thresholds = [1u64, 2, 4, 8]
        .iter()
        .map(|v| Threshold::resolve(ThresholdKind::N, &v.to_string(), a, m))
        .collect::<Result<_, _>>()?;
    let rep = run_sweep(&cfg)?;
    print!("{}", rep.to_csv());
    if rep.failures() > 0 {
        return Err(Failure::Check(format!(
            "{} cells fail the ratio audit",
            rep.failures()
        )));
    }
    Ok(())
}

fn sweep(
    config: &Path,
    out: Option<PathBuf>,
    max_points: Option<u64>,
    max_subspaces: Option<u64>,
) -> Outcome {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(v) = max_points {
        cfg.budget.max_points = v;
    }
    if let Some(v) = max_subspaces {
        cfg.budget.max_subspaces = v;
    }
    let rep = run_sweep(&cfg)?;
    let target = out.or_else(|| cfg.output.as_ref().map(|p| cfg.base_dir.join(p)));
    emit(target.as_deref(), &rep.to_csv())?;
    if rep.skipped() > 0 {
        eprintln!("{} cells skipped (budget)", rep.skipped());
    }
    if rep.failures() > 0 {
        let worst = rep
            .rows
            .iter()
            .filter(|r| r.failed())
            .filter_map(|r| match &r.outcome {
                projlab::report::CellOutcome::Done(c) => Some(decimal_string(&c.ratio)),
                _ => None,
            })
            .next()
            .unwrap_or_default();
        return Err(Failure::Check(format!(
            "{} cells fail (first failing ratio {worst})",
            rep.failures()
        )));
    }
    Ok(())
}

fn accept(out: &Path) -> Outcome {
    let budget = Budget::default();
    let mut first = run_suite(&budget);
    for r in &first.results {
        println!("{}", r.line());
    }
    let second = run_suite(&budget);
    let twelve = criterion_12(&first, &second);
    println!("{}", twelve.line());
    first.results.push(twelve);
    first.write(out)?;
    println!("artifacts written to {}", out.display());
    let failed: Vec<String> = first
        .results
        .iter()
        .filter(|r| !r.verdict())
        .map(|r| r.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "criteria {} failed",
            failed.join(", ")
        )))
    }
}
