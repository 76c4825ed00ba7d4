//! Point sets E ⊂ F_p^n as dense membership bit arrays.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bitvec::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::field::{AmbientSpace, FpVector, PointCode};
use crate::grassmannian::{parse_coords, span_codes, Subspace};

/// Largest p^n for which a dense bit array is allocated.
pub const MAX_DENSE_POINTS: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    ambient: AmbientSpace,
    bits: BitVec<u64, Lsb0>,
    cardinality: u64,
}

impl PointSet {
    pub fn empty(ambient: AmbientSpace) -> Result<Self> {
        if ambient.point_count() > MAX_DENSE_POINTS {
            return Err(LabError::BudgetExceeded {
                what: "dense point table",
                needed: ambient.point_count() as u128,
                limit: MAX_DENSE_POINTS as u128,
            });
        }
        Ok(Self {
            ambient,
            bits: bitvec![u64, Lsb0; 0; ambient.point_count() as usize],
            cardinality: 0,
        })
    }

    pub fn full(ambient: AmbientSpace) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        s.bits.fill(true);
        s.cardinality = ambient.point_count();
        Ok(s)
    }

    /// Collects codes, merging repeats.
    pub fn from_codes(ambient: AmbientSpace, codes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        for c in codes {
            s.insert(c)?;
        }
        Ok(s)
    }

    pub fn from_vectors(ambient: AmbientSpace, points: &[FpVector]) -> Result<Self> {
        let mut s = Self::empty(ambient)?;
        for v in points {
            s.insert(ambient.encode(v)?.0)?;
        }
        Ok(s)
    }

    /// Returns whether the point was new.
    pub fn insert(&mut self, code: u64) -> Result<bool> {
        if code >= self.ambient.point_count() {
            return Err(LabError::CodeOutOfRange {
                code,
                limit: self.ambient.point_count(),
            });
        }
        let fresh = !self.bits.replace(code as usize, true);
        self.cardinality += fresh as u64;
        Ok(fresh)
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn len(&self) -> u64 {
        self.cardinality
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    #[inline]
    pub fn contains_code(&self, code: u64) -> bool {
        self.bits.get(code as usize).is_some_and(|b| *b)
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        v.ambient() == self.ambient && self.contains_code(v.code().0)
    }

    /// Member codes in increasing order.
    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn points(&self) -> impl Iterator<Item = FpVector> + '_ {
        self.codes().map(|c| {
            self.ambient
                .decode(PointCode(c))
                .expect("member codes are in range")
        })
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.ambient.check_same(&other.ambient)?;
        let bits = self.bits.clone() | other.bits.clone();
        let cardinality = bits.count_ones() as u64;
        Ok(PointSet {
            ambient: self.ambient,
            bits,
            cardinality,
        })
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.ambient == other.ambient && self.codes().all(|c| other.contains_code(c))
    }

    /// Renders the point-set file format.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("p={},n={}\n", self.ambient.p(), self.ambient.n());
        for v in self.points() {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    /// Parses the point-set file format. `expected`, when given, must match
    /// the header.
    pub fn parse(text: &str, expected: Option<AmbientSpace>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| LabError::parse(1, "missing header"))?;
        let fields = parse_header(header, &["p", "n"]).map_err(|m| LabError::parse(1, m))?;
        let p = u32::try_from(fields[0]).map_err(|_| LabError::parse(1, "p too large"))?;
        let ambient = AmbientSpace::new(p, fields[1] as usize)
            .map_err(|e| LabError::parse(1, e.to_string()))?;
        if let Some(exp) = expected {
            if exp != ambient {
                return Err(LabError::parse(
                    1,
                    format!("header declares {ambient}, expected {exp}"),
                ));
            }
        }
        let mut set = Self::empty(ambient)?;
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let coords = parse_coords(line).map_err(|e| LabError::parse(i + 1, e.to_string()))?;
            let v = ambient
                .vector(&coords)
                .map_err(|e| LabError::parse(i + 1, e.to_string()))?;
            if !set.insert(v.code().0)? {
                return Err(LabError::parse(i + 1, format!("duplicate point {v}")));
            }
        }
        Ok(set)
    }
}

/// Parses `k1=v1,k2=v2,...` with exactly the given keys in order.
pub(crate) fn parse_header(line: &str, keys: &[&str]) -> std::result::Result<Vec<u64>, String> {
    let parts: Vec<&str> = line.trim().split(',').collect();
    if parts.len() != keys.len() {
        return Err(format!("expected header {}", header_shape(keys)));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(part, key)| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected header {}", header_shape(keys)))?;
            if k.trim() != *key {
                return Err(format!("expected key {key:?}, found {:?}", k.trim()));
            }
            v.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad value for {key}: {e}"))
        })
        .collect()
}

fn header_shape(keys: &[&str]) -> String {
    keys.iter()
        .map(|k| format!("{k}=<{k}>"))
        .collect::<Vec<_>>()
        .join(",")
}

/// A uniformly random subset of exactly `size` points, determined by
/// (ambient, size, seed).
pub fn random_point_set(ambient: AmbientSpace, size: u64, seed: u64) -> Result<PointSet> {
    if size > ambient.point_count() {
        return Err(LabError::SizeOutOfRange {
            size,
            limit: ambient.point_count(),
        });
    }
    let mut set = PointSet::empty(ambient)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, ambient.point_count() as usize, size as usize);
    for i in picked.iter() {
        set.insert(i as u64)?;
    }
    Ok(set)
}

/// offset + W.
pub fn affine_flat_set(w: &Subspace, offset: &FpVector) -> Result<PointSet> {
    let a = w.ambient();
    a.check_same(&offset.ambient())?;
    PointSet::from_codes(a, span_codes(a, w.basis().rows(), offset.coords()))
}

/// S₁ = {(x₁, x₂, 1) : x₁² + x₂² = 1} in F_p^3.
pub fn circle_set(p: u32) -> Result<PointSet> {
    let a = AmbientSpace::new(p, 3)?;
    if p == 2 {
        return Err(LabError::Precondition(
            "the circle set needs an odd prime".into(),
        ));
    }
    let mut set = PointSet::empty(a)?;
    let pp = p as u64;
    for x1 in 0..pp {
        for x2 in 0..pp {
            if (x1 * x1 + x2 * x2) % pp == 1 {
                set.insert(a.encode_digits(&[x1 as u32, x2 as u32, 1]))?;
            }
        }
    }
    Ok(set)
}

/// {(a, a², …, aⁿ) : a ≠ 0} in F_p^n.
pub fn moment_curve_set(p: u32, n: usize) -> Result<PointSet> {
    if n < 2 {
        return Err(LabError::Precondition(
            "the moment curve needs n >= 2".into(),
        ));
    }
    let a = AmbientSpace::new(p, n)?;
    if p == 2 {
        return Err(LabError::Precondition(
            "the moment curve needs an odd prime".into(),
        ));
    }
    let mut set = PointSet::empty(a)?;
    let mut digits = vec![0u32; n];
    for t in 1..p {
        let mut pw = 1u32;
        for d in digits.iter_mut() {
            pw = a.mul(pw, t);
            *d = pw;
        }
        set.insert(a.encode_digits(&digits))?;
    }
    Ok(set)
}

pub fn save_point_set(set: &PointSet, path: &Path) -> Result<()> {
    fs::write(path, set.to_file_string())?;
    Ok(())
}

pub fn load_point_set(path: &Path, expected: Option<AmbientSpace>) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    PointSet::parse(&text, expected).map_err(|e| e.with_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn amb(p: u32, n: usize) -> AmbientSpace {
        AmbientSpace::new(p, n).unwrap()
    }

    #[test]
    fn random_sets() {
        let a = amb(3, 3);
        assert!(random_point_set(a, 0, 1).unwrap().is_empty());
        assert_eq!(
            random_point_set(a, 27, 1).unwrap(),
            PointSet::full(a).unwrap()
        );
        assert_eq!(
            random_point_set(a, 10, 99).unwrap(),
            random_point_set(a, 10, 99).unwrap()
        );
        assert_ne!(
            random_point_set(a, 10, 99).unwrap(),
            random_point_set(a, 10, 100).unwrap()
        );
        assert!(matches!(
            random_point_set(a, 28, 1),
            Err(LabError::SizeOutOfRange { .. })
        ));
    }

    #[test]
    fn random_set_inclusion_is_roughly_uniform() {
        let a = amb(5, 3);
        let mut hits = vec![0u32; 125];
        for seed in 0..200 {
            let s = random_point_set(a, 25, seed).unwrap();
            assert_eq!(s.len(), 25);
            for c in s.codes() {
                hits[c as usize] += 1;
            }
        }
        for h in hits {
            let freq = h as f64 / 200.0;
            assert!((0.12..=0.28).contains(&freq), "frequency {freq}");
        }
    }

    #[test]
    fn affine_flats() {
        let a = amb(3, 2);
        let w = Subspace::span(a, &[a.unit(0)]).unwrap();
        let f = affine_flat_set(&w, &a.vector(&[0, 1]).unwrap()).unwrap();
        let expect = PointSet::from_vectors(
            a,
            &[
                a.vector(&[0, 1]).unwrap(),
                a.vector(&[1, 1]).unwrap(),
                a.vector(&[2, 1]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(f, expect);

        let same = affine_flat_set(&w, &a.vector(&[2, 0]).unwrap()).unwrap();
        assert_eq!(same, PointSet::from_codes(a, w.point_codes()).unwrap());

        let b = amb(5, 3);
        let plane = Subspace::parse(b, "1,0,3;0,1,4").unwrap();
        assert_eq!(
            affine_flat_set(&plane, &b.vector(&[1, 2, 3]).unwrap())
                .unwrap()
                .len(),
            25
        );
    }

    fn brute_circle(p: u64) -> u64 {
        (0..p * p)
            .filter(|c| {
                let (x, y) = (c % p, c / p);
                (x * x + y * y) % p == 1
            })
            .count() as u64
    }

    #[test]
    fn circle_sizes() {
        assert_eq!(circle_set(5).unwrap().len(), 4);
        assert_eq!(circle_set(7).unwrap().len(), 8);
        for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let s = circle_set(p).unwrap();
            assert_eq!(s.len(), brute_circle(p as u64));
            let expected = if p % 4 == 1 { p - 1 } else { p + 1 };
            assert_eq!(s.len(), expected as u64);
            for v in s.points() {
                let c = v.coords();
                assert_eq!(c[2], 1);
                assert_eq!((c[0] * c[0] + c[1] * c[1]) % p, 1);
            }
        }
        assert!(circle_set(2).is_err());
    }

    #[test]
    fn moment_curve() {
        let s = moment_curve_set(7, 3).unwrap();
        assert_eq!(s.len(), 6);
        let mut firsts: Vec<u32> = s.points().map(|v| v.coords()[0]).collect();
        firsts.sort();
        assert_eq!(firsts, vec![1, 2, 3, 4, 5, 6]);
        for v in s.points() {
            let t = v.coords()[0];
            assert_eq!(v.coords(), &[t, t * t % 7, t * t * t % 7]);
        }
        for p in [3u32, 5, 7, 11, 13] {
            for n in 2..=4 {
                assert_eq!(moment_curve_set(p, n).unwrap().len(), (p - 1) as u64);
            }
        }
        assert!(moment_curve_set(7, 1).is_err());
    }

    #[test]
    fn file_format() {
        let a = amb(3, 2);
        let s = PointSet::parse("p=3,n=2\n", None).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.ambient(), a);

        let s = PointSet::parse("p=3,n=2\n1,2\n0,0\n", Some(a)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_file_string(), "p=3,n=2\n0,0\n1,2\n");

        let err = PointSet::parse("p=3,n=2\n1,2\n", Some(amb(3, 3))).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 1, .. }));
        let err = PointSet::parse("p=3,n=2\n1,2\n1,2\n", None).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 3, .. }));
        let err = PointSet::parse("p=3,n=2\n1,3\n", None).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 2, .. }));
        let err = PointSet::parse("p=3;n=2\n", None).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 1, .. }));
        assert!(PointSet::parse("p=4,n=2\n", None).is_err());
        assert!(PointSet::parse("", None).is_err());
    }

    #[test]
    fn save_then_load() {
        let a = amb(3, 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.txt");
        let s = random_point_set(a, 11, 5).unwrap();
        save_point_set(&s, &path).unwrap();
        assert_eq!(load_point_set(&path, Some(a)).unwrap(), s);
    }

    proptest! {
        #[test]
        fn file_round_trip(seed in any::<u64>(), size in 0u64..=125) {
            let a = amb(5, 3);
            let s = random_point_set(a, size, seed).unwrap();
            prop_assert_eq!(PointSet::parse(&s.to_file_string(), Some(a)).unwrap(), s);
        }
    }
}
