//! Experiment configs and the sweep runner behind `projlab sweep`.
//!
//! A config is one JSON document:
//!
//! ```json
//! {
//!   "p": 7, "n": 3, "m": 1,
//!   "family": "random:3/2:42",
//!   "sets": ["random:20:7", "flat:1:5", "circle"],
//!   "thresholds": { "kind": "N", "values": [1, 2, 4] },
//!   "audit": { "spread_c": 8, "ratio_c": 16 },
//!   "output": "report.csv"
//! }
//! ```
//!
//! `families` (a list) may replace `family`. Threshold kinds are `N`
//! (integers), `t` (rational exponents, N = floor(p^t)) and `eps`
//! (rationals, N = floor(ε·p^m)).

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::exact::{big, decimal_string, floor_power, le_affine_power, Exponent};
use crate::families::{
    circle_family, load_family, moment_family, sample_random_family, spread_containing,
    spread_perp, Family, RandomFamilyConfig, Spread,
};
use crate::field::AmbientSpace;
use crate::grassmannian::Subspace;
use crate::pointsets::{
    affine_flat_set, circle_set, load_point_set, moment_curve_set, random_point_set, PointSet,
};
use crate::projection::ProjectionProfile;

pub const CSV_HEADER: [&str; 17] = [
    "p",
    "n",
    "m",
    "family_id",
    "family_size",
    "set_id",
    "set_size",
    "threshold_kind",
    "threshold",
    "exceptional_count",
    "bound_num",
    "bound_den",
    "ratio",
    "spread_containing",
    "spread_perp",
    "seed",
    "pass",
];

pub const DEFAULT_SPREAD_C: u64 = 8;
pub const DEFAULT_RATIO_C: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Random { alpha: Exponent, seed: u64 },
    Circle,
    Moment,
    Full,
    File(PathBuf),
}

impl FamilySpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["random", alpha, seed] => {
                let alpha: Exponent = alpha.parse().map_err(|e: LabError| e.to_string())?;
                let alpha = alpha.check_denominator().map_err(|e| e.to_string())?;
                let seed = seed
                    .parse()
                    .map_err(|_| format!("bad seed {seed:?} in family spec"))?;
                Ok(FamilySpec::Random { alpha, seed })
            }
            ["circle"] => Ok(FamilySpec::Circle),
            ["moment"] => Ok(FamilySpec::Moment),
            ["full"] => Ok(FamilySpec::Full),
            ["file", ..] if parts.len() >= 2 => Ok(FamilySpec::File(PathBuf::from(&s[5..]))),
            _ => Err(format!(
                "unknown family spec {s:?} (expected random:ALPHA:SEED, circle, moment, full or file:PATH)"
            )),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            FamilySpec::Random { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Random { alpha, seed } => write!(f, "random:{alpha}:{seed}"),
            FamilySpec::Circle => f.write_str("circle"),
            FamilySpec::Moment => f.write_str("moment"),
            FamilySpec::Full => f.write_str("full"),
            FamilySpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    Random {
        size: u64,
        seed: u64,
    },
    /// span(e_0, …, e_{k−1}) translated by the point with code `offset`.
    Flat {
        k: usize,
        offset: u64,
    },
    Circle,
    Moment,
    File(PathBuf),
}

impl SetSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let int = |v: &str, what: &str| -> std::result::Result<u64, String> {
            v.parse()
                .map_err(|_| format!("bad {what} {v:?} in set spec {s:?}"))
        };
        match parts.as_slice() {
            ["random", size, seed] => Ok(SetSpec::Random {
                size: int(size, "size")?,
                seed: int(seed, "seed")?,
            }),
            ["flat", k, offset] => Ok(SetSpec::Flat {
                k: int(k, "dimension")? as usize,
                offset: int(offset, "offset")?,
            }),
            ["circle"] => Ok(SetSpec::Circle),
            ["moment"] => Ok(SetSpec::Moment),
            ["file", ..] if parts.len() >= 2 => Ok(SetSpec::File(PathBuf::from(&s[5..]))),
            _ => Err(format!(
                "unknown set spec {s:?} (expected random:SIZE:SEED, flat:K:OFFSET, circle, moment or file:PATH)"
            )),
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Random { size, seed } => write!(f, "random:{size}:{seed}"),
            SetSpec::Flat { k, offset } => write!(f, "flat:{k}:{offset}"),
            SetSpec::Circle => f.write_str("circle"),
            SetSpec::Moment => f.write_str("moment"),
            SetSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    N,
    T,
    Eps,
}

impl ThresholdKind {
    pub fn name(&self) -> &'static str {
        match self {
            ThresholdKind::N => "N",
            ThresholdKind::T => "t",
            ThresholdKind::Eps => "eps",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "N" => Some(ThresholdKind::N),
            "t" => Some(ThresholdKind::T),
            "eps" => Some(ThresholdKind::Eps),
            _ => None,
        }
    }
}

/// One threshold value with the integer N it resolves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub kind: ThresholdKind,
    pub label: String,
    pub n: u64,
}

impl Threshold {
    pub fn resolve(
        kind: ThresholdKind,
        raw: &str,
        ambient: AmbientSpace,
        m: usize,
    ) -> Result<Self> {
        let value: Exponent = raw.parse()?;
        let n = match kind {
            ThresholdKind::N => {
                if value.denom() != 1 || value.numer() < 0 {
                    return Err(LabError::Precondition(format!(
                        "N = {raw} must be a non-negative integer"
                    )));
                }
                value.numer() as u64
            }
            ThresholdKind::T => floor_power(ambient.p(), value.check_denominator()?)?,
            ThresholdKind::Eps => {
                if value.numer() < 0 {
                    return Err(LabError::Precondition(format!("eps = {raw} is negative")));
                }
                let r = value.ratio();
                let pm = ambient.pow(m) as i128;
                (*r.numer() as i128 * pm / *r.denom() as i128) as u64
            }
        };
        Ok(Threshold {
            kind,
            label: value.to_string(),
            n,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ambient: AmbientSpace,
    pub m: usize,
    pub families: Vec<FamilySpec>,
    pub sets: Vec<SetSpec>,
    pub thresholds: Vec<Threshold>,
    pub spread_c: BigRational,
    pub ratio_c: BigRational,
    pub output: Option<PathBuf>,
    pub budget: Budget,
    /// Directory that relative `file:` paths are resolved against.
    pub base_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    p: u32,
    n: usize,
    m: usize,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    families: Vec<String>,
    #[serde(default)]
    sets: Vec<String>,
    #[serde(default)]
    thresholds: Option<RawThresholds>,
    #[serde(default)]
    audit: Option<RawAudit>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    budget: Option<RawBudget>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    kind: String,
    values: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAudit {
    #[serde(default)]
    spread_c: Option<Value>,
    #[serde(default)]
    ratio_c: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    #[serde(default)]
    max_points: Option<u64>,
    #[serde(default)]
    max_subspaces: Option<u64>,
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// 1-based line of the first occurrence of `needle`, or of the key when the
/// needle is not found verbatim.
fn line_of(text: &str, needle: &str, key: &str) -> usize {
    let find = |pat: &str| text.lines().position(|l| l.contains(pat)).map(|i| i + 1);
    find(needle)
        .or_else(|| find(&format!("\"{key}\"")))
        .unwrap_or(1)
}

fn parse_rational(raw: &str) -> Result<BigRational> {
    let e: Exponent = raw.parse()?;
    let r = BigRational::new(BigInt::from(e.numer()), BigInt::from(e.denom()));
    if r.is_negative() {
        return Err(LabError::Precondition(format!("{raw} is negative")));
    }
    Ok(r)
}

impl ExperimentConfig {
    /// An empty config with default constants and budget.
    pub fn new(ambient: AmbientSpace, m: usize) -> Result<Self> {
        crate::families::check_codim(ambient, m)?;
        Ok(ExperimentConfig {
            ambient,
            m,
            families: Vec::new(),
            sets: Vec::new(),
            thresholds: Vec::new(),
            spread_c: big(DEFAULT_SPREAD_C),
            ratio_c: big(DEFAULT_RATIO_C),
            output: None,
            budget: Budget::default(),
            base_dir: PathBuf::from("."),
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| LabError::parse(e.line().max(1), e.to_string()))?;
        let at =
            |needle: &str, key: &str, msg: String| LabError::parse(line_of(text, needle, key), msg);

        let ambient =
            AmbientSpace::new(raw.p, raw.n).map_err(|e| at("\"p\"", "p", e.to_string()))?;
        crate::families::check_codim(ambient, raw.m)
            .map_err(|e| at("\"m\"", "m", e.to_string()))?;

        let mut family_strs = raw.families;
        if let Some(f) = raw.family {
            family_strs.insert(0, f);
        }
        let families = family_strs
            .iter()
            .map(|s| FamilySpec::parse(s).map_err(|m| at(&format!("\"{s}\""), "family", m)))
            .collect::<Result<Vec<_>>>()?;
        let sets = raw
            .sets
            .iter()
            .map(|s| SetSpec::parse(s).map_err(|m| at(&format!("\"{s}\""), "sets", m)))
            .collect::<Result<Vec<_>>>()?;

        let thresholds = match raw.thresholds {
            None => Vec::new(),
            Some(t) => {
                let kind = ThresholdKind::parse(&t.kind).ok_or_else(|| {
                    at(
                        "\"kind\"",
                        "kind",
                        format!("threshold kind {:?} is not one of N, t, eps", t.kind),
                    )
                })?;
                t.values
                    .iter()
                    .map(|v| {
                        let s = value_text(v);
                        Threshold::resolve(kind, &s, ambient, raw.m)
                            .map_err(|e| at(&s, "values", e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };

        let (mut spread_c, mut ratio_c) = (big(DEFAULT_SPREAD_C), big(DEFAULT_RATIO_C));
        if let Some(a) = raw.audit {
            if let Some(v) = a.spread_c {
                spread_c = parse_rational(&value_text(&v))
                    .map_err(|e| at("\"spread_c\"", "spread_c", e.to_string()))?;
            }
            if let Some(v) = a.ratio_c {
                ratio_c = parse_rational(&value_text(&v))
                    .map_err(|e| at("\"ratio_c\"", "ratio_c", e.to_string()))?;
            }
        }

        let mut budget = Budget::default();
        if let Some(b) = raw.budget {
            budget.max_points = b.max_points.unwrap_or(budget.max_points);
            budget.max_subspaces = b.max_subspaces.unwrap_or(budget.max_subspaces);
        }

        let cfg = ExperimentConfig {
            ambient,
            m: raw.m,
            families,
            sets,
            thresholds,
            spread_c,
            ratio_c,
            output: raw.output,
            budget,
            base_dir: base_dir.to_path_buf(),
        };
        for f in &cfg.families {
            cfg.check_family_spec(f)
                .map_err(|e| at(&format!("\"{f}\""), "family", e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| e.with_path(path))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn check_family_spec(&self, spec: &FamilySpec) -> Result<()> {
        let (n, m) = (self.ambient.n(), self.m);
        match spec {
            FamilySpec::Random { alpha, .. } => {
                RandomFamilyConfig::new(self.ambient, m, *alpha, 0).map(|_| ())
            }
            FamilySpec::Circle if n != 3 || m != 2 => Err(LabError::Precondition(
                "the circle family lives in G(3,1): needs n = 3, m = 2".into(),
            )),
            FamilySpec::Moment if m != n - 1 => Err(LabError::Precondition(
                "the moment family consists of lines: needs m = n - 1".into(),
            )),
            _ => Ok(()),
        }
    }

    fn build_family(&self, spec: &FamilySpec) -> Result<Family> {
        let a = self.ambient;
        let g = match spec {
            FamilySpec::Random { alpha, seed } => {
                let cfg = RandomFamilyConfig::new(a, self.m, *alpha, *seed)?;
                sample_random_family(&cfg, &self.budget)?
            }
            FamilySpec::Circle => circle_family(a.p())?,
            FamilySpec::Moment => moment_family(a.p(), a.n())?,
            FamilySpec::Full => Family::full(a, self.m, &self.budget)?,
            FamilySpec::File(p) => load_family(&self.resolve(p))?,
        };
        a.check_same(&g.ambient())?;
        if g.codim() != self.m {
            return Err(LabError::Precondition(format!(
                "family {spec} has codimension {}, config says m = {}",
                g.codim(),
                self.m
            )));
        }
        Ok(g)
    }

    pub fn build_set(&self, spec: &SetSpec) -> Result<PointSet> {
        let a = self.ambient;
        let e = match spec {
            SetSpec::Random { size, seed } => random_point_set(a, *size, *seed)?,
            SetSpec::Flat { k, offset } => {
                if *k > a.n() {
                    return Err(LabError::DimensionOutOfRange { k: *k, n: a.n() });
                }
                let w = Subspace::span(a, &(0..*k).map(|i| a.unit(i)).collect::<Vec<_>>())?;
                let offset = a.decode(crate::field::PointCode(*offset))?;
                affine_flat_set(&w, &offset)?
            }
            SetSpec::Circle => circle_set(a.p())?,
            SetSpec::Moment => moment_curve_set(a.p(), a.n())?,
            SetSpec::File(p) => load_point_set(&self.resolve(p), Some(a))?,
        };
        a.check_same(&e.ambient())?;
        if e.is_empty() {
            return Err(LabError::EmptySet);
        }
        Ok(e)
    }
}

/// Computed fields of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub family_size: u64,
    pub exceptional_count: u64,
    pub bound: BigRational,
    pub ratio: BigRational,
    pub spread_containing: u64,
    pub spread_perp: u64,
    pub argument_holds: bool,
    pub spread_pass: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Done(CellResult),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub p: u32,
    pub n: usize,
    pub m: usize,
    pub family_id: String,
    pub set_id: String,
    pub set_size: u64,
    pub threshold: Threshold,
    pub seed: Option<u64>,
    pub outcome: CellOutcome,
}

impl ReportRow {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, CellOutcome::Done(c) if c.pass)
    }

    pub fn failed(&self) -> bool {
        matches!(&self.outcome, CellOutcome::Done(c) if !c.pass)
    }

    pub fn skipped(&self) -> bool {
        matches!(self.outcome, CellOutcome::Skipped(_))
    }

    pub fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.p.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.family_id.clone(),
        ];
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        match &self.outcome {
            CellOutcome::Done(c) => {
                r.extend([
                    c.family_size.to_string(),
                    self.set_id.clone(),
                    self.set_size.to_string(),
                    self.threshold.kind.name().to_string(),
                    self.threshold.label.clone(),
                    c.exceptional_count.to_string(),
                    c.bound.numer().to_string(),
                    c.bound.denom().to_string(),
                    decimal_string(&c.ratio),
                    c.spread_containing.to_string(),
                    c.spread_perp.to_string(),
                    seed,
                    if c.pass { "true" } else { "false" }.to_string(),
                ]);
            }
            CellOutcome::Skipped(_) => {
                r.extend([
                    String::new(),
                    self.set_id.clone(),
                    self.set_size.to_string(),
                    self.threshold.kind.name().to_string(),
                    self.threshold.label.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    seed,
                    "skipped".to_string(),
                ]);
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub rows: Vec<ReportRow>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }

    pub fn skipped(&self) -> usize {
        self.rows.iter().filter(|r| r.skipped()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.record()).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

struct BuiltFamily {
    family: Family,
    spread_containing: Spread,
    spread_perp: Spread,
    spread_pass: bool,
}

/// spread ≤ C·|G|·p^(−β)
pub fn spread_within(max_count: u64, c: &BigRational, family_size: u64, p: u32, beta: i64) -> bool {
    le_affine_power(
        &big(max_count),
        &big(0),
        &(c * big(family_size)),
        p,
        Exponent::integer(-beta),
    )
}

fn build(cfg: &ExperimentConfig, spec: &FamilySpec) -> Result<BuiltFamily> {
    let family = cfg.build_family(spec)?;
    let sc = spread_containing(&family);
    let sp = spread_perp(&family);
    let (n, m, p) = (cfg.ambient.n() as i64, cfg.m as i64, cfg.ambient.p());
    let size = family.len() as u64;
    // The spreadness hypotheses only apply to random families above the
    // matching exponent.
    let spread_pass = match spec {
        FamilySpec::Random { alpha, .. } => {
            let over = |b: i64| *alpha > Exponent::integer(b);
            (!over(m) || spread_within(sc.max_count, &cfg.spread_c, size, p, m))
                && (!over(n - m) || spread_within(sp.max_count, &cfg.spread_c, size, p, n - m))
        }
        _ => true,
    };
    Ok(BuiltFamily {
        family,
        spread_containing: sc,
        spread_perp: sp,
        spread_pass,
    })
}

/// Runs every (family, set, threshold) cell. Cells run in parallel; rows
/// come back in config order. Budget overruns skip the affected cells,
/// every other error aborts the run.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let sets = cfg
        .sets
        .iter()
        .map(|s| cfg.build_set(s))
        .collect::<Result<Vec<_>>>()?;
    let mut built: Vec<std::result::Result<BuiltFamily, String>> = Vec::new();
    let results: Vec<Result<BuiltFamily>> = cfg
        .families
        .par_iter()
        .map(|spec| build(cfg, spec))
        .collect();
    for r in results {
        match r {
            Ok(b) => built.push(Ok(b)),
            Err(e) if e.is_budget() => built.push(Err(e.to_string())),
            Err(e) => return Err(e),
        }
    }

    let cells: Vec<(usize, usize)> = (0..cfg.families.len())
        .flat_map(|f| (0..sets.len()).map(move |s| (f, s)))
        .collect();
    let blocks: Vec<Vec<ReportRow>> = cells
        .par_iter()
        .map(|&(fi, si)| {
            let spec = &cfg.families[fi];
            let e = &sets[si];
            let row = |outcome| ReportRow {
                p: cfg.ambient.p(),
                n: cfg.ambient.n(),
                m: cfg.m,
                family_id: spec.to_string(),
                set_id: cfg.sets[si].to_string(),
                set_size: e.len(),
                threshold: Threshold {
                    kind: ThresholdKind::N,
                    label: String::new(),
                    n: 0,
                },
                seed: spec.seed(),
                outcome,
            };
            match &built[fi] {
                Err(msg) => cfg
                    .thresholds
                    .iter()
                    .map(|t| ReportRow {
                        threshold: t.clone(),
                        ..row(CellOutcome::Skipped(msg.clone()))
                    })
                    .collect(),
                Ok(b) => {
                    let profile = ProjectionProfile::new(e, &b.family)
                        .expect("sets are non-empty and share the ambient space");
                    cfg.thresholds
                        .iter()
                        .map(|t| {
                            let rep = profile.exceptional(t.n);
                            let pass = rep.ratio_within(&cfg.ratio_c)
                                && rep.argument_holds
                                && b.spread_pass;
                            ReportRow {
                                threshold: t.clone(),
                                ..row(CellOutcome::Done(CellResult {
                                    family_size: b.family.len() as u64,
                                    exceptional_count: rep.count,
                                    bound: rep.bound,
                                    ratio: rep.ratio,
                                    spread_containing: b.spread_containing.max_count,
                                    spread_perp: b.spread_perp.max_count,
                                    argument_holds: rep.argument_holds,
                                    spread_pass: b.spread_pass,
                                    pass,
                                }))
                            }
                        })
                        .collect()
                }
            }
        })
        .collect();
    Ok(SweepReport {
        rows: blocks.into_iter().flatten().collect(),
    })
}

/// The ratio of a computed cell as a float.
pub fn ratio_of(row: &ReportRow) -> Option<f64> {
    match &row.outcome {
        CellOutcome::Done(c) => c.ratio.to_f64(),
        CellOutcome::Skipped(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(text, Path::new("."))
    }

    #[test]
    fn spec_round_trips() {
        for s in ["random:3/2:42", "circle", "moment", "full", "file:a/b.txt"] {
            assert_eq!(FamilySpec::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(
            FamilySpec::parse("random:1.5:42").unwrap().to_string(),
            "random:3/2:42"
        );
        for s in ["random:20:7", "flat:1:5", "circle", "moment", "file:x"] {
            assert_eq!(SetSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(FamilySpec::parse("random:1/13:1").is_err());
        assert!(FamilySpec::parse("lines").is_err());
        assert!(SetSpec::parse("random:x:1").is_err());
    }

    #[test]
    fn thresholds_resolve() {
        let a = AmbientSpace::new(7, 3).unwrap();
        let t = |k, s: &str| Threshold::resolve(k, s, a, 1).unwrap().n;
        assert_eq!(t(ThresholdKind::N, "4"), 4);
        assert_eq!(t(ThresholdKind::T, "3/2"), 18);
        assert_eq!(t(ThresholdKind::T, "0.5"), 2);
        assert_eq!(t(ThresholdKind::Eps, "1/2"), 3);
        assert_eq!(t(ThresholdKind::Eps, "1"), 7);
        assert!(Threshold::resolve(ThresholdKind::N, "1/2", a, 1).is_err());
        assert!(Threshold::resolve(ThresholdKind::Eps, "-1", a, 1).is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let text = "{\n  \"p\": 7,\n  \"n\": 3,\n  \"m\": 1,\n  \"family\": \"lines\"\n}";
        match cfg(text).unwrap_err() {
            LabError::Parse { line, .. } => assert_eq!(line, 5),
            e => panic!("{e}"),
        }
        let text = "{\n  \"p\": 7,\n  \"n\": 3,\n  \"m\": 1,\n  \"sets\": [\"random:2:1\",\n  \"flat:x:1\"]\n}";
        match cfg(text).unwrap_err() {
            LabError::Parse { line, .. } => assert_eq!(line, 6),
            e => panic!("{e}"),
        }
        let text = "{\n  \"p\": 8,\n  \"n\": 3,\n  \"m\": 1\n}";
        match cfg(text).unwrap_err() {
            LabError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        let text = "{\n  \"p\": 7,\n  \"n\": 3\n  \"m\": 1\n}";
        match cfg(text).unwrap_err() {
            LabError::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
        // α outside (min(m, n−m), m(n−m)]
        let text = "{\"p\": 7, \"n\": 3, \"m\": 1, \"family\": \"random:1:3\"}";
        assert!(cfg(text).is_err());
        let text = "{\"p\": 7, \"n\": 3, \"m\": 1, \"family\": \"circle\"}";
        assert!(cfg(text).is_err());
        let text = "{\"p\": 7, \"n\": 3, \"m\": 1, \"extra\": 1}";
        assert!(cfg(text).is_err());
    }

    #[test]
    fn empty_set_list_gives_header_only() {
        let c = cfg(r#"{"p": 7, "n": 3, "m": 1, "family": "random:3/2:42",
                       "thresholds": {"kind": "N", "values": [1, 2]}}"#)
        .unwrap();
        let rep = run_sweep(&c).unwrap();
        assert_eq!(rep.to_csv(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn monte_carlo_cell_and_determinism() {
        let text = r#"{"p": 7, "n": 3, "m": 1, "family": "random:1.5:42",
                       "sets": ["random:20:7"],
                       "thresholds": {"kind": "N", "values": [1, 2, 4]}}"#;
        let c = cfg(text).unwrap();
        let a = run_sweep(&c).unwrap();
        assert_eq!(a.rows.len(), 3);
        for r in &a.rows {
            assert!(ratio_of(r).unwrap() <= 16.0);
        }
        let csv = a.to_csv();
        for _ in 0..3 {
            assert_eq!(run_sweep(&c).unwrap().to_csv(), csv);
        }
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with("7,3,1,random:3/2:42,"), "{first}");
        assert!(first.ends_with(",42,true"), "{first}");
    }

    #[test]
    fn pass_is_recomputable_from_row() {
        let c = cfg(
            r#"{"p": 5, "n": 3, "m": 2, "families": ["full", "circle", "moment"],
                       "sets": ["random:10:1", "flat:1:7", "circle"],
                       "thresholds": {"kind": "t", "values": ["1/2", "1"]}}"#,
        )
        .unwrap();
        let rep = run_sweep(&c).unwrap();
        assert_eq!(rep.rows.len(), 3 * 3 * 2);
        for r in &rep.rows {
            let CellOutcome::Done(cell) = &r.outcome else {
                panic!("unexpected skip")
            };
            // ratio = count / (num/den), all read back from the row
            let expect = if cell.bound == big(0) {
                big(0)
            } else {
                big(cell.exceptional_count) / &cell.bound
            };
            assert_eq!(cell.ratio, expect);
            assert_eq!(cell.pass, cell.ratio <= big(16) && cell.argument_holds);
        }
    }

    #[test]
    fn budget_overrun_skips_cells() {
        let c = cfg(
            r#"{"p": 7, "n": 3, "m": 1, "families": ["full", "random:3/2:1"],
                       "sets": ["random:5:1"],
                       "thresholds": {"kind": "N", "values": [1]},
                       "budget": {"max_subspaces": 10}}"#,
        )
        .unwrap();
        let rep = run_sweep(&c).unwrap();
        assert_eq!(rep.skipped(), 2);
        assert!(rep.to_csv().lines().nth(1).unwrap().ends_with(",skipped"));
    }

    #[test]
    fn file_specs_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let a = AmbientSpace::new(3, 2).unwrap();
        let e = PointSet::from_codes(a, [0, 1, 4]).unwrap();
        crate::pointsets::save_point_set(&e, &dir.path().join("e.txt")).unwrap();
        let g = Family::full(a, 1, &Budget::default()).unwrap();
        crate::families::save_family(&g, &dir.path().join("g.txt")).unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"p": 3, "n": 2, "m": 1, "family": "file:g.txt", "sets": ["file:e.txt"],
                "thresholds": {"kind": "N", "values": [2]}}"#,
        )
        .unwrap();
        let c = ExperimentConfig::load(&path).unwrap();
        let rep = run_sweep(&c).unwrap();
        let CellOutcome::Done(cell) = &rep.rows[0].outcome else {
            panic!()
        };
        assert_eq!((cell.family_size, cell.exceptional_count), (4, 3));
    }
}
