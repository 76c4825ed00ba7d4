//! Exact comparisons involving powers p^e with rational exponents.
//!
//! Every bound in the crate has the shape `a + b·p^e` with rational a, b and
//! rational e. Comparisons raise both sides to the denominator of e so that
//! nothing is ever rounded.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// A rational exponent r/q in lowest terms with q > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub const MAX_DENOMINATOR: i64 = 12;

    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(LabError::InvalidExponent(format!("{numer}/0")));
        }
        Ok(Self(Ratio::new(numer, denom)))
    }

    pub fn integer(v: i64) -> Self {
        Self(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Ratio::from_integer(0)
    }

    /// Rejects denominators above [`Exponent::MAX_DENOMINATOR`].
    pub fn check_denominator(self) -> Result<Self> {
        if self.denom() > Self::MAX_DENOMINATOR {
            return Err(LabError::InvalidExponent(format!(
                "{self} has denominator above {}",
                Self::MAX_DENOMINATOR
            )));
        }
        Ok(self)
    }
}

impl std::ops::Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Self) -> Self {
        Exponent(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Self) -> Self {
        Exponent(self.0 - rhs.0)
    }
}

impl std::ops::Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Self {
        Exponent(-self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = LabError;

    /// Accepts `3`, `3/2`, `-1/4` and terminating decimals such as `1.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || LabError::InvalidExponent(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b <= 0 {
                return Err(bad());
            }
            return Exponent::new(a, b);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_part: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse::<i64>().map_err(|_| bad())?.abs()
            };
            let den = 10i64.pow(frac.len() as u32);
            let frac_part: i64 = frac.parse().map_err(|_| bad())?;
            let num = int_part
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac_part))
                .ok_or_else(bad)?;
            return Exponent::new(if negative { -num } else { num }, den);
        }
        s.parse::<i64>().map(Exponent::integer).map_err(|_| bad())
    }
}

pub fn big(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn pow_uint(p: u32, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// Orders a non-negative rational `x` against p^e.
pub fn cmp_to_power(x: &BigRational, p: u32, e: Exponent) -> Ordering {
    assert!(!x.is_negative(), "cmp_to_power needs x >= 0");
    let q = e.denom() as usize;
    let r = e.numer();
    let a = x.numer().magnitude().clone();
    let b = x.denom().magnitude().clone();
    let mut lhs = num_traits::pow(a, q);
    let mut rhs = num_traits::pow(b, q);
    if r >= 0 {
        rhs *= pow_uint(p, r as u64);
    } else {
        lhs *= pow_uint(p, r.unsigned_abs());
    }
    lhs.cmp(&rhs)
}

/// Checks `lhs <= a + b·p^e` exactly; a and b must be non-negative.
pub fn le_affine_power(
    lhs: &BigRational,
    a: &BigRational,
    b: &BigRational,
    p: u32,
    e: Exponent,
) -> bool {
    let d = lhs - a;
    if !d.is_positive() {
        return true;
    }
    if b.is_zero() {
        return false;
    }
    cmp_to_power(&(d / b), p, e) != Ordering::Greater
}

/// floor(p^e) for e ≥ 0.
pub fn floor_power(p: u32, e: Exponent) -> Result<u64> {
    if e.numer() < 0 {
        return Ok(0);
    }
    let q = e.denom() as usize;
    let target = pow_uint(p, e.numer() as u64);
    // largest v with v^q <= target
    let mut lo = BigUint::one();
    let mut hi = target.clone() + BigUint::one();
    while &lo + BigUint::one() < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if num_traits::pow(mid.clone(), q) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.to_u64().ok_or(LabError::Overflow("floor of a power"))
}

/// Smallest integer T ≥ 0 with T ≥ scale·p^e/den, i.e. the ceiling of
/// scale·p^e/den. Used to turn an irrational probability into an integer
/// threshold on a uniform integer draw.
pub fn ceil_scaled_power(scale: u64, p: u32, e: Exponent, den: u64) -> BigUint {
    // T^q · den^q ≥ scale^q · p^r
    let q = e.denom() as usize;
    let r = e.numer();
    let mut target = num_traits::pow(BigUint::from(scale), q);
    let mut lhs_factor = num_traits::pow(BigUint::from(den), q);
    if r >= 0 {
        target *= pow_uint(p, r as u64);
    } else {
        lhs_factor *= pow_uint(p, r.unsigned_abs());
    }
    let ok = |t: &BigUint| num_traits::pow(t.clone(), q) * &lhs_factor >= target;
    let mut hi = BigUint::one();
    while !ok(&hi) {
        hi <<= 1;
    }
    let mut lo = BigUint::zero();
    if ok(&lo) {
        return lo;
    }
    // invariant: !ok(lo), ok(hi)
    while &lo + BigUint::one() < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if ok(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// "num/den" in lowest terms.
pub fn fraction_string(x: &BigRational) -> (String, String) {
    (x.numer().to_string(), x.denom().to_string())
}

/// Decimal with 12 significant digits, for display only.
pub fn decimal_string(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let v = rational_to_f64(x);
    format!("{v:.11e}")
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    // scale so both parts fit comfortably in f64
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}
