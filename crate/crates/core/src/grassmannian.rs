//! Linear subspaces of F_p^n in canonical form, their annihilators, and
//! coset labelling.

use std::fmt;
use std::str::FromStr;

use crate::budget::Budget;
use crate::error::{LabError, Result};
use crate::field::{
    gaussian_binomial, nullspace, reduce_rows, rref, AmbientSpace, FpMatrix, FpVector, PointCode,
};

/// A linear subspace stored as its reduced row echelon basis.
///
/// Equality, hashing and ordering all go through the basis, so two values
/// compare equal exactly when they describe the same subspace. The order is
/// lexicographic on the row-major entries of the basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: FpMatrix,
}

impl Subspace {
    /// Wraps an already canonical basis; rejects anything else.
    pub fn new(basis: FpMatrix) -> Result<Self> {
        let r = rref(&basis);
        if r.matrix != basis {
            return Err(LabError::NotCanonical);
        }
        Ok(Self { basis })
    }

    /// The span of arbitrary vectors.
    pub fn span(ambient: AmbientSpace, vectors: &[FpVector]) -> Result<Self> {
        let m = FpMatrix::from_vectors(ambient, vectors)?;
        Ok(Self {
            basis: rref(&m).matrix,
        })
    }

    pub fn from_rows(ambient: AmbientSpace, rows: Vec<Vec<u32>>) -> Result<Self> {
        Ok(Self {
            basis: rref(&FpMatrix::new(ambient, rows)?).matrix,
        })
    }

    pub fn zero(ambient: AmbientSpace) -> Self {
        Self {
            basis: FpMatrix::empty(ambient),
        }
    }

    pub fn full(ambient: AmbientSpace) -> Self {
        Self {
            basis: FpMatrix::identity(ambient),
        }
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.basis.ambient()
    }

    pub fn dim(&self) -> usize {
        self.basis.row_count()
    }

    /// Codimension n - dim.
    pub fn codim(&self) -> usize {
        self.ambient().n() - self.dim()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .position(|&x| x != 0)
                    .expect("canonical rows are nonzero")
            })
            .collect()
    }

    pub fn is_proper_nontrivial(&self) -> bool {
        self.dim() > 0 && self.dim() < self.ambient().n()
    }

    pub(crate) fn require_proper(&self) -> Result<()> {
        if self.is_proper_nontrivial() {
            Ok(())
        } else {
            Err(LabError::TrivialSubspace {
                dim: self.dim(),
                n: self.ambient().n(),
            })
        }
    }

    pub fn contains(&self, v: &FpVector) -> Result<bool> {
        self.ambient().check_same(&v.ambient())?;
        Ok(self.contains_digits(v.coords()))
    }

    /// Membership solve: subtract the pivot multiples and test for zero.
    pub(crate) fn contains_digits(&self, v: &[u32]) -> bool {
        let a = self.ambient();
        let mut y = v.to_vec();
        for (row, pc) in self.basis.rows().iter().zip(self.pivots()) {
            let t = y[pc];
            if t != 0 {
                for (yi, &ri) in y.iter_mut().zip(row) {
                    *yi = a.sub(*yi, a.mul(t, ri));
                }
            }
        }
        y.iter().all(|&x| x == 0)
    }

    /// The annihilator {x : x·w = 0 for all w ∈ W}.
    pub fn perp(&self) -> Subspace {
        Subspace {
            basis: nullspace(&self.basis),
        }
    }

    /// Codes of all p^dim points, in no particular order.
    pub fn point_codes(&self) -> Vec<u64> {
        span_codes(
            self.ambient(),
            self.basis.rows(),
            &vec![0; self.ambient().n()],
        )
    }

    pub fn coset_reducer(&self) -> CosetReducer {
        CosetReducer::new(self)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.basis.fmt(f)
    }
}

impl Subspace {
    /// Parses the `1,0,2;0,1,1` serialization; the rows are canonicalised.
    pub fn parse(ambient: AmbientSpace, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let mut rows = Vec::new();
        for row in s.split(';') {
            let coords = parse_coords(row)?;
            rows.push(ambient.vector(&coords)?.coords().to_vec());
        }
        Self::from_rows(ambient, rows)
    }
}

pub(crate) fn parse_coords(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|c| {
            u64::from_str(c.trim())
                .map_err(|e| LabError::parse(0, format!("bad coordinate {c:?}: {e}")))
        })
        .collect()
}

/// All points offset + Σ c_r row_r, as codes.
pub(crate) fn span_codes(ambient: AmbientSpace, rows: &[Vec<u32>], offset: &[u32]) -> Vec<u64> {
    let n = ambient.n();
    let mut pts: Vec<u32> = offset.to_vec();
    for row in rows {
        let count = pts.len() / n;
        let mut next = Vec::with_capacity(pts.len() * ambient.p() as usize);
        for i in 0..count {
            let base = &pts[i * n..(i + 1) * n];
            let mut cur = base.to_vec();
            for _ in 0..ambient.p() {
                next.extend_from_slice(&cur);
                for (c, &r) in cur.iter_mut().zip(row) {
                    *c = ambient.add(*c, r);
                }
            }
        }
        pts = next;
    }
    pts.chunks(n).map(|d| ambient.encode_digits(d)).collect()
}

/// Maps points to their coset of a fixed subspace W.
///
/// The basis is brought to reduced echelon form with the columns scanned from
/// the most significant coordinate down. Clearing those pivot coordinates
/// sends x to the element of x + W with the smallest [`PointCode`]; the
/// remaining coordinates index the p^m cosets, in increasing order of their
/// representatives.
#[derive(Debug, Clone)]
pub struct CosetReducer {
    ambient: AmbientSpace,
    pivots: Vec<usize>,
    free: Vec<usize>,
    // neg_coef[i][r] = -row_r[free[i]]
    neg_coef: Vec<Vec<u32>>,
    free_weight: Vec<u64>,
}

impl CosetReducer {
    fn new(w: &Subspace) -> Self {
        let a = w.ambient();
        let mut rows = w.basis.rows().to_vec();
        let pivots = reduce_rows(a, &mut rows, (0..a.n()).rev());
        let free: Vec<usize> = (0..a.n()).filter(|c| !pivots.contains(c)).collect();
        let neg_coef = free
            .iter()
            .map(|&f| rows.iter().map(|r| a.sub(0, r[f])).collect())
            .collect();
        let free_weight = free.iter().map(|&f| a.pow(f)).collect();
        Self {
            ambient: a,
            pivots,
            free,
            neg_coef,
            free_weight,
        }
    }

    /// Number of cosets, p^m.
    pub fn coset_count(&self) -> usize {
        self.ambient.pow(self.free.len()) as usize
    }

    /// Index in [0, p^m) of the coset containing `x`.
    #[inline]
    pub fn fiber_index(&self, x: &[u32]) -> usize {
        let p = self.ambient.p() as u64;
        let mut idx = 0u64;
        for (i, &f) in self.free.iter().enumerate().rev() {
            let mut v = x[f] as u64;
            for (&c, &pc) in self.neg_coef[i].iter().zip(&self.pivots) {
                v += c as u64 * x[pc] as u64;
            }
            idx = idx * p + v % p;
        }
        idx as usize
    }

    /// Smallest point code in the coset with the given index.
    pub fn representative(&self, index: usize) -> PointCode {
        let p = self.ambient.p() as u64;
        let mut idx = index as u64;
        let mut code = 0u64;
        for &w in &self.free_weight {
            code += (idx % p) * w;
            idx /= p;
        }
        PointCode(code)
    }
}

/// A coset x + W named by its smallest point code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    pub subspace: Subspace,
    pub representative: PointCode,
}

impl CosetLabel {
    /// Codes of the p^dim W points of the coset.
    pub fn point_codes(&self) -> Vec<u64> {
        let a = self.subspace.ambient();
        let mut offset = vec![0u32; a.n()];
        a.decode_into(self.representative.0, &mut offset);
        span_codes(a, self.subspace.basis.rows(), &offset)
    }
}

/// All k-dimensional subspaces, each once, in increasing [`Subspace`] order.
pub fn enumerate_subspaces(
    ambient: AmbientSpace,
    k: usize,
    budget: &Budget,
) -> Result<Vec<Subspace>> {
    let n = ambient.n();
    if k > n {
        return Err(LabError::DimensionOutOfRange { k, n });
    }
    let total = match gaussian_binomial(n, k, ambient.p()) {
        Ok(t) => t,
        Err(LabError::Overflow(_)) => {
            return Err(LabError::BudgetExceeded {
                what: "subspace enumeration",
                needed: u128::MAX,
                limit: budget.max_subspaces as u128,
            })
        }
        Err(e) => return Err(e),
    };
    budget.check_subspaces(total)?;

    let mut out = Vec::with_capacity(total as usize);
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        push_pivot_cell(ambient, &pivots, &mut out);
        // next k-subset of 0..n in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| pivots[i] < n - k + i) else {
            break;
        };
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    out.sort_unstable();
    debug_assert_eq!(out.len() as u64, total);
    Ok(out)
}

/// Every canonical basis whose pivot columns are `pivots`.
fn push_pivot_cell(ambient: AmbientSpace, pivots: &[usize], out: &mut Vec<Subspace>) {
    let n = ambient.n();
    let p = ambient.p();
    let free: Vec<(usize, usize)> = pivots
        .iter()
        .enumerate()
        .flat_map(|(r, &pc)| {
            (pc + 1..n)
                .filter(|c| !pivots.contains(c))
                .map(move |c| (r, c))
        })
        .collect();
    let mut rows: Vec<Vec<u32>> = pivots
        .iter()
        .map(|&pc| {
            let mut row = vec![0u32; n];
            row[pc] = 1;
            row
        })
        .collect();
    let mut digits = vec![0u32; free.len()];
    loop {
        for (&(r, c), &d) in free.iter().zip(&digits) {
            rows[r][c] = d;
        }
        out.push(Subspace {
            basis: FpMatrix::new(ambient, rows.clone()).expect("entries reduced"),
        });
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub fn perp(w: &Subspace) -> Subspace {
    w.perp()
}

pub fn contains(w: &Subspace, v: &FpVector) -> Result<bool> {
    w.contains(v)
}

/// The coset of a proper non-trivial W containing x.
pub fn coset_label(w: &Subspace, x: &FpVector) -> Result<CosetLabel> {
    w.require_proper()?;
    w.ambient().check_same(&x.ambient())?;
    let reducer = w.coset_reducer();
    Ok(CosetLabel {
        subspace: w.clone(),
        representative: reducer.representative(reducer.fiber_index(x.coords())),
    })
}

/// The p^m cosets of W ordered by representative.
pub fn enumerate_cosets(w: &Subspace) -> Result<Vec<CosetLabel>> {
    w.require_proper()?;
    let reducer = w.coset_reducer();
    Ok((0..reducer.coset_count())
        .map(|i| CosetLabel {
            subspace: w.clone(),
            representative: reducer.representative(i),
        })
        .collect())
}

pub fn span_of_point(x: &FpVector) -> Result<Subspace> {
    if x.is_zero() {
        return Err(LabError::ZeroVector);
    }
    Subspace::span(x.ambient(), std::slice::from_ref(x))
}
