//! The discrete Fourier transform on F_p^n with additive characters
//! e(−x·ξ) = exp(−2πi (x·ξ mod p)/p), and the coset-energy identity
//!
//!   Σ_j |E ∩ (x_j + W)|² = p^(−m) Σ_{ξ ∈ Per(W)} |Ê(ξ)|².
//!
//! The spatial side is always an exact integer; the spectral side is the
//! floating-point quantity under test.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::Result;
use crate::field::{dot_digits, AmbientSpace, FpVector};
use crate::grassmannian::Subspace;
use crate::pointsets::PointSet;
use crate::projection::Fibers;

/// root[k] = exp(−2πi k / p), one exact angle per residue.
fn roots(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|k| {
            let theta = TAU * k as f64 / p as f64;
            Complex64::new(theta.cos(), -theta.sin())
        })
        .collect()
}

/// ξ ↦ Ê(ξ) for all p^n frequencies, indexed by point code.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    ambient: AmbientSpace,
    values: Vec<Complex64>,
}

impl SpectralTable {
    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, xi: &FpVector) -> Complex64 {
        self.values[xi.code().0 as usize]
    }

    /// Σ_ξ |Ê(ξ)|²
    pub fn total_power(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    /// p^(−m) Σ_{ξ ∈ Per(W)} |Ê(ξ)|², walking Per(W) through its basis.
    pub fn coset_energy(&self, w: &Subspace) -> Result<f64> {
        self.ambient.check_same(&w.ambient())?;
        w.require_proper()?;
        let per = w.perp();
        let sum: f64 = per
            .point_codes()
            .into_iter()
            .map(|c| self.values[c as usize].norm_sqr())
            .sum();
        Ok(sum / self.ambient.pow(per.dim()) as f64)
    }

    /// Compares the exact fiber energy of `e` over the cosets of `w` with
    /// this table's spectral side.
    pub fn verify_coset_identity(
        &self,
        e: &PointSet,
        w: &Subspace,
        tol: f64,
    ) -> Result<IdentityCheck> {
        let spatial = Fibers::new(e, w)?.energy();
        let spectral = self.coset_energy(w)?;
        Ok(IdentityCheck::new(spatial, spectral, tol))
    }
}

/// Axis-factored transform, O(n·p^(n+1)).
pub fn dft(e: &PointSet, budget: &Budget) -> Result<SpectralTable> {
    let a = e.ambient();
    budget.check_points(a.point_count())?;
    let p = a.p() as usize;
    let root = roots(a.p());
    let mut values = vec![Complex64::new(0.0, 0.0); a.point_count() as usize];
    for c in e.codes() {
        values[c as usize] = Complex64::new(1.0, 0.0);
    }
    let total = values.len();
    let mut stride = 1usize;
    for _axis in 0..a.n() {
        let block = stride * p;
        // each block holds p interleaved lines of length p along this axis
        values.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); p];
            for offset in 0..stride {
                for (x, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[offset + x * stride];
                }
                for xi in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, &v) in line.iter().enumerate() {
                        acc += v * root[(x * xi) % p];
                    }
                    chunk[offset + xi * stride] = acc;
                }
            }
        });
        stride = block;
        debug_assert!(stride <= total);
    }
    Ok(SpectralTable { ambient: a, values })
}

/// Direct summation Σ_{x∈E} e(−x·ξ) for every ξ, O(|E|·p^n).
pub fn dft_direct(e: &PointSet, budget: &Budget) -> Result<SpectralTable> {
    let a = e.ambient();
    budget.check_points(a.point_count())?;
    let root = roots(a.p());
    let pts: Vec<Vec<u32>> = e.points().map(|v| v.coords().to_vec()).collect();
    let values = (0..a.point_count())
        .into_par_iter()
        .map(|code| {
            let mut xi = vec![0u32; a.n()];
            a.decode_into(code, &mut xi);
            pts.iter()
                .map(|x| root[dot_digits(a.p(), x, &xi) as usize])
                .sum()
        })
        .collect();
    Ok(SpectralTable { ambient: a, values })
}

/// |Σ_ξ |Ê(ξ)|² − p^n·|E||
pub fn plancherel_defect(e: &PointSet, budget: &Budget) -> Result<f64> {
    let table = dft(e, budget)?;
    Ok(plancherel_defect_of(&table, e))
}

pub fn plancherel_defect_of(table: &SpectralTable, e: &PointSet) -> f64 {
    let expected = table.ambient.point_count() as f64 * e.len() as f64;
    (table.total_power() - expected).abs()
}

pub fn coset_energy_via_fourier(e: &PointSet, w: &Subspace, budget: &Budget) -> Result<f64> {
    dft(e, budget)?.coset_energy(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub spatial: u128,
    pub spectral: f64,
    pub pass: bool,
}

impl IdentityCheck {
    /// pass iff |spatial − spectral| ≤ tol · max(1, spatial).
    pub fn new(spatial: u128, spectral: f64, tol: f64) -> Self {
        let s = spatial as f64;
        let pass = (s - spectral).abs() <= tol * s.max(1.0);
        Self {
            spatial,
            spectral,
            pass,
        }
    }

    pub fn defect(&self) -> f64 {
        (self.spatial as f64 - self.spectral).abs()
    }
}

pub fn verify_coset_identity(
    e: &PointSet,
    w: &Subspace,
    tol: f64,
    budget: &Budget,
) -> Result<IdentityCheck> {
    dft(e, budget)?.verify_coset_identity(e, w, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use crate::field::{gaussian_binomial, PointCode};
    use crate::grassmannian::enumerate_subspaces;
    use crate::pointsets::{affine_flat_set, random_point_set};

    fn amb(p: u32, n: usize) -> AmbientSpace {
        AmbientSpace::new(p, n).unwrap()
    }

    const B: Budget = Budget {
        max_points: 100_000,
        max_subspaces: 200_000,
    };

    #[test]
    fn zero_frequency_and_full_space() {
        let a = amb(5, 3);
        let e = random_point_set(a, 17, 2).unwrap();
        let t = dft(&e, &B).unwrap();
        assert!((t.values()[0] - Complex64::new(17.0, 0.0)).norm() < 1e-9);

        let t = dft(&PointSet::full(a).unwrap(), &B).unwrap();
        assert!((t.values()[0].re - 125.0).abs() < 1e-9);
        assert!(t.values()[1..].iter().all(|z| z.norm() < 1e-6));
    }

    #[test]
    fn factored_matches_direct() {
        for (p, n, seeds) in [(3, 2, 10), (5, 3, 4), (2, 5, 4), (7, 2, 4)] {
            let a = amb(p, n);
            for seed in 0..seeds {
                let size = 1 + seed * 3 % a.point_count();
                let e = random_point_set(a, size, seed).unwrap();
                let fast = dft(&e, &B).unwrap();
                let slow = dft_direct(&e, &B).unwrap();
                for (x, y) in fast.values().iter().zip(slow.values()) {
                    assert!((x - y).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn conjugate_symmetry_and_linearity() {
        let a = amb(5, 2);
        let e = random_point_set(a, 9, 4).unwrap();
        let t = dft(&e, &B).unwrap();
        for c in 0..a.point_count() {
            let xi = a.decode(PointCode(c)).unwrap();
            let neg = a.zero().sub(&xi).unwrap();
            assert!((t.value(&neg) - t.value(&xi).conj()).norm() < 1e-9);
        }
        let full = PointSet::full(a).unwrap();
        let rest = PointSet::from_codes(a, full.codes().filter(|&c| !e.contains_code(c))).unwrap();
        let tr = dft(&rest, &B).unwrap();
        let tu = dft(&e.union(&rest).unwrap(), &B).unwrap();
        for ((x, y), z) in t.values().iter().zip(tr.values()).zip(tu.values()) {
            assert!((x + y - z).norm() < 1e-9);
        }
    }

    #[test]
    fn plancherel() {
        let a = amb(3, 2);
        assert_eq!(
            plancherel_defect(&PointSet::empty(a).unwrap(), &B).unwrap(),
            0.0
        );
        let single = PointSet::from_codes(a, [7]).unwrap();
        let t = dft(&single, &B).unwrap();
        assert!(t.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!((t.total_power() - 9.0).abs() < 1e-9);

        let a = amb(7, 2);
        for seed in 0..100 {
            let e = random_point_set(a, 1 + seed % 49, seed).unwrap();
            let d = plancherel_defect(&e, &B).unwrap();
            assert!(d < 1e-6 * 49.0 * e.len() as f64);
        }
    }

    #[test]
    fn coset_identity_examples() {
        let a = amb(3, 2);
        let w = Subspace::parse(a, "0,1").unwrap();
        let e = PointSet::from_vectors(
            a,
            &[
                a.vector(&[0, 0]).unwrap(),
                a.vector(&[1, 0]).unwrap(),
                a.vector(&[1, 1]).unwrap(),
            ],
        )
        .unwrap();
        let v = coset_energy_via_fourier(&e, &w, &B).unwrap();
        assert!((v - 5.0).abs() < 1e-9);
        // Per(W) = span((1,0)): Ê(0)=3, |Ê((1,0))|² = |Ê((2,0))|² = 3
        let t = dft(&e, &B).unwrap();
        assert!((t.value(&a.vector(&[1, 0]).unwrap()).norm_sqr() - 3.0).abs() < 1e-9);

        let empty = PointSet::empty(a).unwrap();
        let r = verify_coset_identity(&empty, &w, 1e-6, &B).unwrap();
        assert_eq!((r.spatial, r.pass), (0, true));
        assert!(r.spectral.abs() < 1e-12);

        let b = amb(5, 3);
        let full = PointSet::full(b).unwrap();
        let t = dft(&full, &B).unwrap();
        for w in enumerate_subspaces(b, 1, &B).unwrap().iter().take(5) {
            // m = 2: p^(2n−m) = 5^4
            assert!((t.coset_energy(w).unwrap() - 625.0).abs() < 1e-6);
            let coset = affine_flat_set(w, &b.unit(2)).unwrap();
            let r = verify_coset_identity(&coset, w, 1e-9, &B).unwrap();
            assert_eq!(r.spatial, 25);
            assert!(r.pass);
        }
        assert!(t.coset_energy(&Subspace::zero(b)).is_err());
    }

    #[test]
    fn coset_identity_over_all_planes() {
        let a = amb(5, 3);
        let planes = enumerate_subspaces(a, 2, &B).unwrap();
        for seed in 0..20 {
            let e = random_point_set(a, 5 + seed * 6, seed).unwrap();
            let t = dft(&e, &B).unwrap();
            for w in &planes {
                assert!(t.verify_coset_identity(&e, w, 1e-6).unwrap().pass);
            }
        }
    }

    #[test]
    fn perp_multiplicities() {
        // Σ_W Σ_{ξ∈Per W} |Ê|² = |G||E|² + |G(n−1, n−m)|·(p^n|E| − |E|²)
        for (p, n, m) in [(3, 3, 1), (3, 3, 2), (5, 3, 2), (3, 4, 2)] {
            let a = amb(p, n);
            let g = Family::full(a, m, &B).unwrap();
            let e = random_point_set(a, 7, 1).unwrap();
            let t = dft(&e, &B).unwrap();
            let mut total = 0.0;
            for w in g.members() {
                total += t.coset_energy(w).unwrap() * a.pow(m) as f64;
            }
            let es = e.len() as f64;
            let mult = gaussian_binomial(n - 1, n - m, p).unwrap() as f64;
            let expect = g.len() as f64 * es * es + mult * (a.point_count() as f64 * es - es * es);
            assert!((total - expect).abs() < 1e-6 * expect);
        }
    }

    #[test]
    fn budget_guard() {
        let tight = Budget {
            max_points: 10,
            max_subspaces: 10,
        };
        let e = PointSet::empty(amb(3, 3)).unwrap();
        assert!(dft(&e, &tight).unwrap_err().is_budget());
        assert!(dft_direct(&e, &tight).unwrap_err().is_budget());
    }
}
