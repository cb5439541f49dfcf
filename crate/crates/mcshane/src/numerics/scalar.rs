use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Exact scalar: a fraction of arbitrary-precision integers kept in lowest terms.
pub type Rational = BigRational;

/// Relative threshold below which a floating determinant is treated as zero.
pub const GENERIC_TOL: f64 = 1e-12;

/// Field operations shared by exact and floating scalars.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for scalars whose arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    /// Zero test used for genericity: exact equality for exact scalars,
    /// `|x| <= GENERIC_TOL * scale` for floating scalars.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            let v = self.to_f64().abs();
            v.is_nan() || v <= GENERIC_TOL * scale
        }
    }
}

/// Floating scalars with elementary functions.
pub trait Real: Scalar {
    fn from_f64(v: f64) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// Relative rounding unit of this value's precision.
    fn unit_roundoff(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn unit_roundoff(&self) -> f64 {
        f64::EPSILON
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// `p/q` as an exact rational.
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Nearest float, saturating to ±inf / 0 outside the double range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || Zero::is_zero(r)) {
            return v;
        }
    }
    let l = ln_abs_rational(r);
    let s = if r.is_negative() { -1.0 } else { 1.0 };
    s * l.exp()
}

fn ln_abs_bigint(b: &BigInt) -> f64 {
    let bits = b.bits();
    if bits <= 1000 {
        return b.to_f64().map(|v| v.abs().ln()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigInt = b.abs() >> (shift as usize);
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|r|`, valid far outside the double exponent range.
pub fn ln_abs_rational(r: &Rational) -> f64 {
    if Zero::is_zero(r) {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

/// Binary length of the larger of numerator and denominator.
pub fn rational_height_bits(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// Canonical `p/q` (or `p`) string of an exact rational.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(p) = t.parse::<BigInt>() {
        return Some(Rational::from_integer(p));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(num * num::pow(ten, scale as usize))
    } else {
        Rational::new(num, num::pow(ten, (-scale) as usize))
    };
    Some(r)
}

pub(crate) fn bigint_sign_bytes(b: &BigInt) -> (bool, Vec<u8>) {
    let (sign, bytes) = b.to_bytes_le();
    (sign == Sign::Minus, bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rational_converts_through_logs() {
        let big = Rational::from_integer(num::pow(BigInt::from(10), 400));
        assert_eq!(rational_to_f64(&big), f64::INFINITY);
        let l = ln_abs_rational(&big);
        assert!((l - 400.0 * std::f64::consts::LN_10).abs() < 1e-9);
        let tiny = Rational::new(BigInt::from(3), num::pow(BigInt::from(10), 400));
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(rational(1, 2)));
        assert_eq!(parse_rational("-7"), Some(rational(-7, 1)));
        assert_eq!(parse_rational("0.125"), Some(rational(1, 8)));
        assert_eq!(parse_rational("2.5e1"), Some(rational(25, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn negligible_is_exact_for_rationals() {
        assert!(!rational(1, 1_000_000_000).is_negligible(1.0));
        assert!(1e-14_f64.is_negligible(1.0));
        assert!(!1e-10_f64.is_negligible(1.0));
    }
}
