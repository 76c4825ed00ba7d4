//! Projections π^W(E), coset energies, and exceptional-set counts.
//!
//! Everything here is an exact integer count. The work for one (E, W) pair
//! is a single pass over E that buckets each point into its coset of W; all
//! other quantities are read off those fiber sizes.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::exact::{big, cmp_to_power, Exponent};
use crate::families::{check_codim, Family};
use crate::field::{AmbientSpace, PointCode};
use crate::grassmannian::{CosetLabel, Subspace};
use crate::pointsets::PointSet;

/// Sizes |E ∩ (x_j + W)| for the p^m cosets of W, indexed as in
/// [`crate::grassmannian::CosetReducer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibers {
    counts: Vec<u64>,
}

impl Fibers {
    pub fn new(e: &PointSet, w: &Subspace) -> Result<Self> {
        e.ambient().check_same(&w.ambient())?;
        w.require_proper()?;
        Ok(Self::compute(e, w))
    }

    fn compute(e: &PointSet, w: &Subspace) -> Self {
        let a = e.ambient();
        let reducer = w.coset_reducer();
        let mut counts = vec![0u64; reducer.coset_count()];
        let mut x = vec![0u32; a.n()];
        for code in e.codes() {
            a.decode_into(code, &mut x);
            counts[reducer.fiber_index(&x)] += 1;
        }
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// |π^W(E)|
    pub fn image_size(&self) -> u64 {
        self.counts.iter().filter(|&&c| c > 0).count() as u64
    }

    /// Σ_j |E ∩ (x_j + W)|²
    pub fn energy(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128 * c as u128).sum()
    }

    /// Σ_j |E ∩ (x_j + W)|, always |E|.
    pub fn incidences(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Ordered pairs x ≠ y of E in a common coset.
    pub fn pairs(&self) -> u128 {
        self.counts
            .iter()
            .map(|&c| c as u128 * c.saturating_sub(1) as u128)
            .sum()
    }
}

/// π^W(E) as the sorted list of coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionImage {
    pub subspace: Subspace,
    pub representatives: Vec<PointCode>,
}

impl ProjectionImage {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = CosetLabel> + '_ {
        self.representatives.iter().map(|&r| CosetLabel {
            subspace: self.subspace.clone(),
            representative: r,
        })
    }
}

pub fn project(e: &PointSet, w: &Subspace) -> Result<ProjectionImage> {
    let fibers = Fibers::new(e, w)?;
    let reducer = w.coset_reducer();
    let representatives = fibers
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, _)| reducer.representative(i))
        .collect();
    Ok(ProjectionImage {
        subspace: w.clone(),
        representatives,
    })
}

/// Σ over the listed planes of |E ∩ plane|².
pub fn energy(e: &PointSet, planes: &[CosetLabel]) -> Result<u128> {
    let mut total = 0u128;
    for plane in planes {
        e.ambient().check_same(&plane.subspace.ambient())?;
        let hits = plane
            .point_codes()
            .into_iter()
            .filter(|&c| e.contains_code(c))
            .count() as u128;
        total += hits * hits;
    }
    Ok(total)
}

fn check_family(e: &PointSet, g: &Family) -> Result<()> {
    e.ambient().check_same(&g.ambient())?;
    check_codim(g.ambient(), g.codim())
}

/// Fibers of E for every member of G, in member order.
pub fn family_fibers(e: &PointSet, g: &Family) -> Result<Vec<Fibers>> {
    check_family(e, g)?;
    Ok(g.members()
        .par_iter()
        .map(|w| Fibers::compute(e, w))
        .collect())
}

/// E(E, G'): the energy of E over every coset of every member of G.
pub fn family_coset_energy(e: &PointSet, g: &Family) -> Result<u128> {
    Ok(family_fibers(e, g)?.iter().map(Fibers::energy).sum())
}

/// Split of E(E, G') into incidences and ordered distinct pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidenceDecomposition {
    pub incidences: u128,
    pub pairs: u128,
}

impl IncidenceDecomposition {
    pub fn total(&self) -> u128 {
        self.incidences + self.pairs
    }
}

pub fn incidence_decomposition(e: &PointSet, g: &Family) -> Result<IncidenceDecomposition> {
    let fibers = family_fibers(e, g)?;
    Ok(IncidenceDecomposition {
        incidences: fibers.iter().map(Fibers::incidences).sum(),
        pairs: fibers.iter().map(Fibers::pairs).sum(),
    })
}

/// Both sides of |E|² ≤ |π^W(E)| · Σ_j |E ∩ (x_j + W)|².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CauchySchwarzGap {
    pub lhs: u128,
    pub rhs: u128,
}

impl CauchySchwarzGap {
    pub fn from_fibers(f: &Fibers) -> Self {
        let size = f.incidences();
        Self {
            lhs: size * size,
            rhs: f.image_size() as u128 * f.energy(),
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

pub fn cauchy_schwarz_gap(e: &PointSet, w: &Subspace) -> Result<CauchySchwarzGap> {
    Ok(CauchySchwarzGap::from_fibers(&Fibers::new(e, w)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalReport {
    pub family_size: u64,
    pub set_size: u64,
    pub threshold: u64,
    /// |Θ| with Θ = {W ∈ G : |π^W(E)| ≤ N}.
    pub count: u64,
    /// |G|·N·(|E|⁻¹ + p⁻ᵐ).
    pub bound: BigRational,
    /// count / bound, zero when both vanish.
    pub ratio: BigRational,
    /// E(E, Θ').
    pub theta_energy: u128,
    /// |Θ|·|E|² ≤ E(E, Θ')·N; vacuous when N = 0.
    pub argument_holds: bool,
}

impl ExceptionalReport {
    /// ratio ≤ c, decided on the exact fields.
    pub fn ratio_within(&self, c: &BigRational) -> bool {
        &self.ratio <= c
    }
}

/// Per-member image sizes and coset energies of one set over one family,
/// reused across thresholds.
#[derive(Debug, Clone)]
pub struct ProjectionProfile {
    p_pow_m: u64,
    set_size: u64,
    image_sizes: Vec<u64>,
    energies: Vec<u128>,
}

impl ProjectionProfile {
    pub fn new(e: &PointSet, g: &Family) -> Result<Self> {
        if e.is_empty() {
            return Err(LabError::EmptySet);
        }
        let fibers = family_fibers(e, g)?;
        Ok(Self {
            p_pow_m: g.ambient().pow(g.codim()),
            set_size: e.len(),
            image_sizes: fibers.iter().map(Fibers::image_size).collect(),
            energies: fibers.iter().map(Fibers::energy).collect(),
        })
    }

    pub fn image_sizes(&self) -> &[u64] {
        &self.image_sizes
    }

    pub fn energies(&self) -> &[u128] {
        &self.energies
    }

    pub fn exceptional(&self, threshold: u64) -> ExceptionalReport {
        let family_size = self.image_sizes.len() as u64;
        let mut count = 0u64;
        let mut theta_energy = 0u128;
        for (&img, &en) in self.image_sizes.iter().zip(&self.energies) {
            if img <= threshold {
                count += 1;
                theta_energy += en;
            }
        }
        let es = self.set_size;
        let pm = self.p_pow_m;
        let bound = BigRational::new(
            BigInt::from(family_size) * BigInt::from(threshold) * BigInt::from(pm + es),
            BigInt::from(es) * BigInt::from(pm),
        );
        let ratio = if bound.is_zero() {
            BigRational::zero()
        } else {
            big(count) / &bound
        };
        let argument_holds = threshold == 0
            || (count as u128) * (es as u128) * (es as u128) <= theta_energy * threshold as u128;
        ExceptionalReport {
            family_size,
            set_size: es,
            threshold,
            count,
            bound,
            ratio,
            theta_energy,
            argument_holds,
        }
    }
}

pub fn exceptional_count(e: &PointSet, g: &Family, threshold: u64) -> Result<ExceptionalReport> {
    Ok(ProjectionProfile::new(e, g)?.exceptional(threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitBoundBranch {
    /// |E| ≤ p^m: threshold p^t/10, bound ½·p^(m(n−m)−(m−t)).
    Small { t: Exponent },
    /// |E| > p^m: threshold p^m/10, bound ½·p^(m(n−m)−(s−m)).
    Large,
    /// |E| = 1, so (0, s] is empty.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitBoundReport {
    pub branch: ExplicitBoundBranch,
    pub family_size: u64,
    pub count: u64,
    /// The bound as a float, for display.
    pub bound: f64,
    pub pass: bool,
}

/// Counts W ∈ G(n, n−m) with a small projection of E and compares with the
/// explicit constants ½ and 1/10. All comparisons are on integers: t = r/q
/// is handled by raising both sides to the q-th power, and p^(−s) = 1/|E|.
pub fn explicit_bound_check(
    e: &PointSet,
    m: usize,
    t: Exponent,
    budget: &Budget,
) -> Result<ExplicitBoundReport> {
    if e.is_empty() {
        return Err(LabError::EmptySet);
    }
    let a: AmbientSpace = e.ambient();
    check_codim(a, m)?;
    let n = a.n();
    let p = a.p();
    let es = e.len();
    let pm = a.pow(m);
    let base = (m * (n - m)) as i64;

    if es == 1 {
        return Ok(ExplicitBoundReport {
            branch: ExplicitBoundBranch::Vacuous,
            family_size: 0,
            count: 0,
            bound: 0.0,
            pass: true,
        });
    }

    let g = Family::full(a, m, budget)?;
    let profile = ProjectionProfile::new(e, &g)?;
    let images = profile.image_sizes();

    if es <= pm {
        if !t.is_positive() {
            return Err(LabError::InvalidExponent(format!(
                "t = {t} must be positive"
            )));
        }
        // t ≤ s  ⇔  p^t ≤ |E|
        if cmp_to_power(&big(es), p, t).is_lt() {
            return Err(LabError::InvalidExponent(format!(
                "t = {t} exceeds s = log_{p} {es}"
            )));
        }
        // |π|·10 ≤ p^t
        let count = images
            .iter()
            .filter(|&&img| !cmp_to_power(&big(10 * img), p, t).is_gt())
            .count() as u64;
        let exponent = Exponent::integer(base - m as i64) + t;
        let pass = !cmp_to_power(&big(2 * count), p, exponent).is_gt();
        Ok(ExplicitBoundReport {
            branch: ExplicitBoundBranch::Small { t },
            family_size: g.len() as u64,
            count,
            bound: 0.5 * (p as f64).powf(exponent.to_f64()),
            pass,
        })
    } else {
        let count = images.iter().filter(|&&img| 10 * img <= pm).count() as u64;
        // count ≤ ½·p^(m(n−m)+m) / |E|
        let rhs = num_traits::pow(BigUint::from(p), (base as usize) + m);
        let lhs = BigUint::from(2 * count) * BigUint::from(es);
        Ok(ExplicitBoundReport {
            branch: ExplicitBoundBranch::Large,
            family_size: g.len() as u64,
            count,
            bound: 0.5 * (p as f64).powi((base as usize + m) as i32) / es as f64,
            pass: lhs <= rhs,
        })
    }
}
