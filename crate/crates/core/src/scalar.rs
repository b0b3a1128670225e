//! Coefficient scalars.
//!
//! Every series engine is generic over [`Scalar`]. Floats implement it, as
//! does the exact [`BigRational`]. Exact values are kept reduced
//! with a positive denominator by `num-rational`.

use std::fmt::{Debug, Display};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Float-mode threshold below which `s^n - 1` counts as resonant.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Field operations plus the few conversions the engines need.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    /// Mode tag used in serialized metadata.
    const MODE: &'static str;

    fn from_ratio(n: i64, d: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn to_f64(&self) -> f64;

    /// A float value converted into this scalar, or `None` when the scalar is
    /// exact (transcendental numbers have no exact representative).
    fn from_f64_lossy(x: f64) -> Option<Self>;

    /// Zero for the purposes of resonance and degeneracy checks.
    fn is_negligible(&self) -> bool;

    /// `ln |x|`, finite even when `x` overflows f64.
    fn ln_abs(&self) -> f64 {
        self.to_f64().abs().ln()
    }

    fn powi(&self, n: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        Some(x)
    }

    fn is_negligible(&self) -> bool {
        self.abs() < RESONANCE_TOL
    }

    fn powi(&self, n: usize) -> Self {
        f64::powi(*self, n as i32)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_ratio(n: i64, d: i64) -> Self {
        (n as f64 / d as f64) as f32
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn from_f64_lossy(x: f64) -> Option<Self> {
        Some(x as f32)
    }

    fn is_negligible(&self) -> bool {
        // single precision cannot resolve 1e-9
        self.abs() < 1e-6
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self.numer(), self.denom())
    }

    fn from_f64_lossy(_x: f64) -> Option<Self> {
        None
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn ln_abs(&self) -> f64 {
        ln_abs_rational(self)
    }
}

/// Natural log of `|n|`, accurate for integers far beyond the f64 range.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as f64 without reducing the fraction first.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let sign = if (num.sign() == Sign::Minus) ^ (den.sign() == Sign::Minus) {
        -1.0
    } else {
        1.0
    };
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    if nb < 1000 && db < 1000 {
        let v = num.to_f64().unwrap() / den.to_f64().unwrap();
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    // keep 64 significant bits from each side
    let ns = (nb - 64).max(0) as u64;
    let ds = (db - 64).max(0) as u64;
    let n_top = (num.abs() >> ns).to_f64().unwrap();
    let d_top = (den.abs() >> ds).to_f64().unwrap();
    let exp = ns as i64 - ds as i64;
    sign * (n_top / d_top) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// `ln |q|` for an exact rational.
pub fn ln_abs_rational(q: &BigRational) -> f64 {
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

/// Parses `"p/q"` or a decimal literal (integers included) into a reduced rational.
///
/// Decimal literals are taken at face value (`"0.25"` is exactly 1/4).
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str_radix(p.trim(), 10).ok()?;
        let q = BigInt::from_str_radix(q.trim(), 10).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(n) = BigInt::from_str_radix(t, 10) {
        return Some(BigRational::from_integer(n));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.')?;
    if frac.is_empty() && int.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(n, d);
    Some(if neg { -q } else { q })
}

/// Exact rational nearest to a float (used only to seed exact tables from
/// user floats; never inside an exact recursion).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_one<T: Scalar>(x: &T) -> bool {
    (x.clone() - T::one()).is_negligible()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let q = BigRational::from_ratio(6, -8);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(4));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("5/2"), Some(rational(5, 2)));
        assert_eq!(parse_rational(" -3 "), Some(rational(-3, 1)));
        assert_eq!(parse_rational("0.25"), Some(rational(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rational(-3, 2)));
        assert_eq!(parse_rational("4/8"), Some(rational(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn huge_ratio_to_float() {
        let num = num_traits::pow(BigInt::from(3), 2000);
        let den = num_traits::pow(BigInt::from(3), 1999) * BigInt::from(2);
        assert!((ratio_to_f64(&num, &den) - 1.5).abs() < 1e-15);
        assert!((ratio_to_f64(&-num.clone(), &den) + 1.5).abs() < 1e-15);
        let l = ln_abs_bigint(&num);
        assert!((l - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn resonance_threshold() {
        assert!((1e-10f64).is_negligible());
        assert!(!(1e-8f64).is_negligible());
        assert!(BigRational::zero().is_negligible());
        assert!(!rational(1, 1_000_000_000_000).is_negligible());
    }
}
