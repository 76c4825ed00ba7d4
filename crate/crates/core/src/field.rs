//! Arithmetic and linear algebra over the prime field F_p.
//!
//! Points of F_p^n are addressed by [`PointCode`]: the little-endian base-p
//! number whose digit `i` is coordinate `i`. Every dense table in the crate
//! (point sets, spectra, fiber counts) is indexed by this code.

use std::fmt;

use crate::error::{LabError, Result};

/// Trial-division primality test. `p` is small at desk scale.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The vector space F_p^n together with its point count p^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientSpace {
    p: u32,
    n: usize,
    point_count: u64,
}

impl AmbientSpace {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(LabError::NotPrime(p as u64));
        }
        if n == 0 {
            return Err(LabError::ZeroDimension);
        }
        let exp = u32::try_from(n).map_err(|_| LabError::AmbientTooLarge { p, n })?;
        let point_count = (p as u64)
            .checked_pow(exp)
            .ok_or(LabError::AmbientTooLarge { p, n })?;
        Ok(Self { p, n, point_count })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// p^n.
    #[inline]
    pub fn point_count(&self) -> u64 {
        self.point_count
    }

    /// p^k for k ≤ n; never overflows because p^n fits.
    #[inline]
    pub fn pow(&self, k: usize) -> u64 {
        debug_assert!(k <= self.n);
        (self.p as u64).pow(k as u32)
    }

    pub fn check_same(&self, other: &AmbientSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LabError::AmbientMismatch {
                expected_p: self.p,
                expected_n: self.n,
                found_p: other.p,
                found_n: other.n,
            })
        }
    }

    /// Builds a vector, rejecting wrong lengths and unreduced coordinates.
    pub fn vector(&self, coords: &[u64]) -> Result<FpVector> {
        if coords.len() != self.n {
            return Err(LabError::WrongLength {
                expected: self.n,
                found: coords.len(),
            });
        }
        let mut out = Vec::with_capacity(self.n);
        for &c in coords {
            if c >= self.p as u64 {
                return Err(LabError::CoordinateOutOfRange {
                    value: c,
                    p: self.p,
                });
            }
            out.push(c as u32);
        }
        Ok(FpVector {
            ambient: *self,
            coords: out,
        })
    }

    /// Builds a vector from arbitrary integers, reducing each mod p.
    pub fn vector_mod(&self, coords: &[i64]) -> Result<FpVector> {
        if coords.len() != self.n {
            return Err(LabError::WrongLength {
                expected: self.n,
                found: coords.len(),
            });
        }
        let p = self.p as i64;
        Ok(FpVector {
            ambient: *self,
            coords: coords.iter().map(|&c| c.rem_euclid(p) as u32).collect(),
        })
    }

    pub fn zero(&self) -> FpVector {
        FpVector {
            ambient: *self,
            coords: vec![0; self.n],
        }
    }

    /// The standard basis vector e_{i+1} (zero-based index `i`).
    pub fn unit(&self, i: usize) -> FpVector {
        let mut v = self.zero();
        v.coords[i] = 1;
        v
    }

    pub fn encode(&self, v: &FpVector) -> Result<PointCode> {
        self.check_same(&v.ambient)?;
        Ok(PointCode(self.encode_digits(&v.coords)))
    }

    pub fn decode(&self, code: PointCode) -> Result<FpVector> {
        if code.0 >= self.point_count {
            return Err(LabError::CodeOutOfRange {
                code: code.0,
                limit: self.point_count,
            });
        }
        let mut coords = vec![0u32; self.n];
        self.decode_into(code.0, &mut coords);
        Ok(FpVector {
            ambient: *self,
            coords,
        })
    }

    /// Little-endian base-p evaluation of already-reduced digits.
    #[inline]
    pub fn encode_digits(&self, digits: &[u32]) -> u64 {
        let p = self.p as u64;
        digits.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    #[inline]
    pub fn decode_into(&self, mut code: u64, out: &mut [u32]) {
        let p = self.p as u64;
        for d in out.iter_mut() {
            *d = (code % p) as u32;
            code /= p;
        }
    }

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub(crate) fn inv(&self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.p));
        let p = self.p as u64;
        let mut base = a as u64 % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
}

impl fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.n)
    }
}

/// Index of a point of F_p^n in little-endian base p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointCode(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    ambient: AmbientSpace,
    coords: Vec<u32>,
}

impl FpVector {
    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector> {
        self.ambient.check_same(&other.ambient)?;
        let a = self.ambient;
        Ok(FpVector {
            ambient: a,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&x, &y)| a.add(x, y))
                .collect(),
        })
    }

    pub fn sub(&self, other: &FpVector) -> Result<FpVector> {
        self.ambient.check_same(&other.ambient)?;
        let a = self.ambient;
        Ok(FpVector {
            ambient: a,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&x, &y)| a.sub(x, y))
                .collect(),
        })
    }

    pub fn scale(&self, k: u32) -> FpVector {
        let a = self.ambient;
        let k = k % a.p;
        FpVector {
            ambient: a,
            coords: self.coords.iter().map(|&x| a.mul(x, k)).collect(),
        }
    }

    pub fn code(&self) -> PointCode {
        PointCode(self.ambient.encode_digits(&self.coords))
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_row(f, &self.coords)
    }
}

pub(crate) fn write_row(f: &mut impl fmt::Write, row: &[u32]) -> fmt::Result {
    for (i, c) in row.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// (Σ u_i v_i) mod p.
pub fn dot(u: &FpVector, v: &FpVector) -> Result<u32> {
    u.ambient.check_same(&v.ambient)?;
    Ok(dot_digits(u.ambient.p, &u.coords, &v.coords))
}

#[inline]
pub(crate) fn dot_digits(p: u32, u: &[u32], v: &[u32]) -> u32 {
    let p = p as u64;
    let mut acc = 0u64;
    for (&a, &b) in u.iter().zip(v) {
        acc = (acc + a as u64 * b as u64) % p;
    }
    acc as u32
}

/// A list of row vectors of length n over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    ambient: AmbientSpace,
    rows: Vec<Vec<u32>>,
}

impl FpMatrix {
    pub fn new(ambient: AmbientSpace, rows: Vec<Vec<u32>>) -> Result<Self> {
        for row in &rows {
            if row.len() != ambient.n {
                return Err(LabError::WrongLength {
                    expected: ambient.n,
                    found: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|&&c| c >= ambient.p) {
                return Err(LabError::CoordinateOutOfRange {
                    value: bad as u64,
                    p: ambient.p,
                });
            }
        }
        Ok(Self { ambient, rows })
    }

    pub fn from_vectors(ambient: AmbientSpace, vectors: &[FpVector]) -> Result<Self> {
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            ambient.check_same(&v.ambient)?;
            rows.push(v.coords.clone());
        }
        Ok(Self { ambient, rows })
    }

    pub fn empty(ambient: AmbientSpace) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn identity(ambient: AmbientSpace) -> Self {
        let rows = (0..ambient.n)
            .map(|i| {
                let mut r = vec![0; ambient.n];
                r[i] = 1;
                r
            })
            .collect();
        Self { ambient, rows }
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> FpVector {
        FpVector {
            ambient: self.ambient,
            coords: self.rows[i].clone(),
        }
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write_row(f, row)?;
        }
        Ok(())
    }
}

/// Output of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination visiting columns in `order`. Zero rows are
/// dropped and row `i` of the result has its leading one at `pivots[i]`.
pub(crate) fn reduce_rows(
    ambient: AmbientSpace,
    rows: &mut Vec<Vec<u32>>,
    order: impl IntoIterator<Item = usize>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0usize;
    for col in order {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next, found);
        let inv = ambient.inv(rows[next][col]);
        if inv != 1 {
            for x in rows[next].iter_mut() {
                *x = ambient.mul(*x, inv);
            }
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = ambient.sub(*x, ambient.mul(factor, y));
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    pivots
}

/// The unique reduced row echelon form of `m`, zero rows removed.
pub fn rref(m: &FpMatrix) -> Rref {
    let mut rows = m.rows.clone();
    let pivots = reduce_rows(m.ambient, &mut rows, 0..m.ambient.n);
    Rref {
        rank: rows.len(),
        matrix: FpMatrix {
            ambient: m.ambient,
            rows,
        },
        pivots,
    }
}

/// Canonical basis of {x : M x^T = 0}.
pub fn nullspace(m: &FpMatrix) -> FpMatrix {
    let a = m.ambient;
    let Rref { matrix, pivots, .. } = rref(m);
    let mut is_pivot = vec![false; a.n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::with_capacity(a.n - pivots.len());
    for free in (0..a.n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; a.n];
        v[free] = 1;
        for (row, &pc) in matrix.rows.iter().zip(&pivots) {
            v[pc] = a.sub(0, row[free]);
        }
        basis.push(v);
    }
    let pivots = reduce_rows(a, &mut basis, 0..a.n);
    debug_assert_eq!(pivots.len(), a.n - matrix.rows.len());
    FpMatrix {
        ambient: a,
        rows: basis,
    }
}

/// Number of k-dimensional subspaces of F_p^n, computed exactly with the
/// q-Pascal recurrence [i, j] = [i-1, j-1] + p^j [i-1, j].
pub fn gaussian_binomial(n: usize, k: usize, p: u32) -> Result<u64> {
    if k > n {
        return Err(LabError::DimensionOutOfRange { k, n });
    }
    if !is_prime(p as u64) {
        return Err(LabError::NotPrime(p as u64));
    }
    let k = k.min(n - k);
    // row[j] holds [i, j] for the current i
    let mut row = vec![0u64; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            let pj = (p as u64)
                .checked_pow(j as u32)
                .ok_or(LabError::Overflow("gaussian binomial"))?;
            row[j] = pj
                .checked_mul(row[j])
                .and_then(|t| t.checked_add(row[j - 1]))
                .ok_or(LabError::Overflow("gaussian binomial"))?;
        }
    }
    Ok(row[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn amb(p: u32, n: usize) -> AmbientSpace {
        AmbientSpace::new(p, n).unwrap()
    }

    fn mat(a: AmbientSpace, rows: &[&[u32]]) -> FpMatrix {
        FpMatrix::new(a, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    // Brute-force span membership: try every coefficient tuple.
    fn in_span(a: AmbientSpace, basis: &[Vec<u32>], v: &[u32]) -> bool {
        let k = basis.len();
        let total = (a.p() as u64).pow(k as u32);
        let mut coeffs = vec![0u32; k];
        for c in 0..total {
            let mut c2 = c;
            for x in coeffs.iter_mut() {
                *x = (c2 % a.p() as u64) as u32;
                c2 /= a.p() as u64;
            }
            let mut acc = vec![0u32; a.n()];
            for (row, &co) in basis.iter().zip(&coeffs) {
                for (s, &r) in acc.iter_mut().zip(row) {
                    *s = (*s + co * r) % a.p();
                }
            }
            if acc == v {
                return true;
            }
        }
        false
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&x| is_prime(x)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(matches!(
            AmbientSpace::new(9, 2),
            Err(LabError::NotPrime(9))
        ));
        assert!(matches!(
            AmbientSpace::new(3, 0),
            Err(LabError::ZeroDimension)
        ));
        assert!(matches!(
            AmbientSpace::new(7, 40),
            Err(LabError::AmbientTooLarge { .. })
        ));
    }

    #[test]
    fn dot_examples() {
        let a = amb(3, 2);
        let u = a.vector(&[1, 2]).unwrap();
        let v = a.vector(&[2, 1]).unwrap();
        assert_eq!(dot(&u, &v).unwrap(), 1);
        assert_eq!(dot(&a.zero(), &v).unwrap(), 0);
        for p in [2, 3, 5, 7] {
            let b = amb(p, 3);
            assert_eq!(dot(&b.unit(0), &b.unit(1)).unwrap(), 0);
        }
        let other = amb(5, 2).vector(&[1, 1]).unwrap();
        assert!(matches!(
            dot(&u, &other),
            Err(LabError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn rref_examples() {
        let a = amb(3, 2);
        let id = FpMatrix::identity(a);
        let r = rref(&id);
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);

        let zero = mat(a, &[&[0, 0], &[0, 0]]);
        let r = rref(&zero);
        assert_eq!(r.rank, 0);
        assert!(r.matrix.rows().is_empty());

        let b = amb(5, 2);
        let r = rref(&mat(b, &[&[1, 2], &[2, 4]]));
        assert_eq!(r.matrix.rows(), &[vec![1, 2]]);
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);

        // leading entry gets normalised: [[2,1],[1,1]] over F_3 has full rank
        let r = rref(&mat(a, &[&[0, 2], &[2, 2]]));
        assert_eq!(r.matrix, FpMatrix::identity(a));
    }

    #[test]
    fn nullspace_examples() {
        let a = amb(3, 2);
        assert_eq!(nullspace(&FpMatrix::identity(a)).row_count(), 0);
        let ns = nullspace(&mat(a, &[&[0, 0]]));
        assert_eq!(ns, FpMatrix::identity(a));

        let b = amb(3, 3);
        let m = mat(b, &[&[1, 0, 1]]);
        let ns = nullspace(&m);
        assert_eq!(ns.row_count(), 2);
        for row in ns.rows() {
            assert_eq!(dot_digits(3, row, &[1, 0, 1]), 0);
        }
        // exhaust all 27 vectors: the solutions are exactly the span
        let mut solutions = 0;
        for code in 0..27 {
            let v = b.decode(PointCode(code)).unwrap();
            let sol = dot_digits(3, v.coords(), &[1, 0, 1]) == 0;
            assert_eq!(sol, in_span(b, ns.rows(), v.coords()));
            solutions += sol as u32;
        }
        assert_eq!(solutions, 9);
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(3, 1, 3).unwrap(), 13);
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), 35);
        for p in [2, 3, 5, 7] {
            for n in 0..6 {
                assert_eq!(gaussian_binomial(n, 0, p).unwrap(), 1);
                assert_eq!(gaussian_binomial(n, n, p).unwrap(), 1);
            }
        }
        assert!(matches!(
            gaussian_binomial(2, 3, 3),
            Err(LabError::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            gaussian_binomial(60, 30, 31),
            Err(LabError::Overflow(_))
        ));
    }

    #[test]
    fn gaussian_binomial_matches_product_formula() {
        // Π (p^n - p^i)/(p^k - p^i) in u128, small enough not to overflow
        for p in [2u32, 3, 5, 7] {
            for n in 0..=5usize {
                for k in 0..=n {
                    let pp = p as u128;
                    let mut num = 1u128;
                    let mut den = 1u128;
                    for i in 0..k as u32 {
                        num *= pp.pow(n as u32) - pp.pow(i);
                        den *= pp.pow(k as u32) - pp.pow(i);
                    }
                    assert_eq!(num % den, 0);
                    assert_eq!(gaussian_binomial(n, k, p).unwrap() as u128, num / den);
                }
            }
        }
    }

    #[test]
    fn gaussian_binomial_symmetry() {
        for p in [2, 3, 5] {
            for n in 0..=5 {
                for k in 0..=n {
                    assert_eq!(
                        gaussian_binomial(n, k, p).unwrap(),
                        gaussian_binomial(n, n - k, p).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn encode_decode_examples() {
        let a = amb(3, 2);
        assert_eq!(a.encode(&a.zero()).unwrap(), PointCode(0));
        assert_eq!(a.encode(&a.vector(&[2, 1]).unwrap()).unwrap(), PointCode(5));
        assert!(matches!(
            a.decode(PointCode(9)),
            Err(LabError::CodeOutOfRange { .. })
        ));
        let b = amb(3, 3);
        for c in 0..27 {
            let v = b.decode(PointCode(c)).unwrap();
            assert_eq!(b.encode(&v).unwrap(), PointCode(c));
        }
    }

    #[test]
    fn encode_decode_bijective_up_to_3125() {
        for (p, n) in [(2, 11), (3, 7), (5, 5), (7, 4), (11, 3), (13, 3)] {
            let a = amb(p, n);
            assert!(a.point_count() <= 3125);
            let mut seen = std::collections::HashSet::new();
            for c in 0..a.point_count() {
                let v = a.decode(PointCode(c)).unwrap();
                assert!(seen.insert(v.coords().to_vec()));
                assert_eq!(a.encode(&v).unwrap().0, c);
            }
            assert_eq!(seen.len() as u64, a.point_count());
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = (u32, usize, Vec<Vec<u32>>)> {
        (
            prop::sample::select(vec![2u32, 3, 5, 7]),
            1usize..=4,
            0usize..=5,
        )
            .prop_flat_map(|(p, n, rows)| {
                (
                    Just(p),
                    Just(n),
                    prop::collection::vec(prop::collection::vec(0..p, n), rows),
                )
            })
    }

    proptest! {
        #[test]
        fn rref_idempotent_and_preserves_row_space((p, n, rows) in matrix_strategy()) {
            let a = amb(p, n);
            let m = FpMatrix::new(a, rows.clone()).unwrap();
            let r = rref(&m);
            prop_assert_eq!(&rref(&r.matrix).matrix, &r.matrix);
            prop_assert_eq!(r.rank, r.matrix.row_count());
            prop_assert!(r.pivots.windows(2).all(|w| w[0] < w[1]));
            for (row, &pc) in r.matrix.rows().iter().zip(&r.pivots) {
                prop_assert_eq!(row[pc], 1);
                prop_assert!(row[..pc].iter().all(|&x| x == 0));
            }
            for &pc in &r.pivots {
                prop_assert_eq!(r.matrix.rows().iter().filter(|row| row[pc] != 0).count(), 1);
            }
            for row in &rows {
                prop_assert!(in_span(a, r.matrix.rows(), row));
            }
        }

        #[test]
        fn rank_nullity((p, n, rows) in matrix_strategy()) {
            let a = amb(p, n);
            let m = FpMatrix::new(a, rows.clone()).unwrap();
            let ns = nullspace(&m);
            prop_assert_eq!(rref(&m).rank + ns.row_count(), n);
            for v in ns.rows() {
                for row in &rows {
                    prop_assert_eq!(dot_digits(p, v, row), 0);
                }
            }
            prop_assert_eq!(&rref(&ns).matrix, &ns);
        }
    }
}
