use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num::BigInt;

use super::scalar::{bigint_sign_bytes, Rational, Real, Scalar};

type Inner = FBig<HalfEven, 2>;

/// Default working precision of the extended tier, in bits.
pub const DEFAULT_BITS: usize = 128;

/// Binary floating scalar with a configurable mantissa width (at least 106 bits).
///
/// Binary operations run at the larger precision of their operands.
#[derive(Clone, Debug)]
pub struct Ext(Inner);

fn bigint_to_ibig(b: &BigInt) -> IBig {
    let (negative, bytes) = bigint_sign_bytes(b);
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    if negative {
        -mag
    } else {
        mag
    }
}

impl Ext {
    pub fn from_rational_bits(r: &Rational, bits: usize) -> Self {
        let num = Inner::from(bigint_to_ibig(r.numer())).with_precision(bits).value();
        let den = Inner::from(bigint_to_ibig(r.denom())).with_precision(bits).value();
        Ext(num / den)
    }

    pub fn from_i64_bits(v: i64, bits: usize) -> Self {
        Ext(Inner::from(IBig::from(v)).with_precision(bits).value())
    }

    /// Exact conversion of a finite double.
    pub fn from_f64_bits(v: f64, bits: usize) -> Self {
        let x = Inner::try_from(v).expect("finite double");
        Ext(x.with_precision(bits).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        Ext(self.0.clone().with_precision(bits).value())
    }
}

impl PartialEq for Ext {
    fn eq(&self, other: &Self) -> bool {
        self.0.repr() == other.0.repr()
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.0.repr().cmp(other.0.repr()))
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        Ext(self.0 + rhs.0)
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        Ext(self.0 - rhs.0)
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        Ext(self.0 * rhs.0)
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, rhs: Ext) -> Ext {
        Ext(self.0 / rhs.0)
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext(-self.0)
    }
}

impl Scalar for Ext {
    const EXACT: bool = false;

    fn zero() -> Self {
        Ext::from_i64_bits(0, DEFAULT_BITS)
    }
    fn one() -> Self {
        Ext::from_i64_bits(1, DEFAULT_BITS)
    }
    fn from_i64(v: i64) -> Self {
        Ext::from_i64_bits(v, DEFAULT_BITS)
    }
    fn from_rational(r: &Rational) -> Self {
        Ext::from_rational_bits(r, DEFAULT_BITS)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn is_zero(&self) -> bool {
        self.0.repr().significand().is_zero()
    }
    fn is_negligible(&self, scale: f64) -> bool {
        let tol = 2f64.powi(-(self.precision() as i32) / 2);
        let v = self.to_f64().abs();
        v.is_nan() || v <= tol * scale
    }
}

impl Real for Ext {
    fn from_f64(v: f64) -> Self {
        Ext::from_f64_bits(v, DEFAULT_BITS)
    }
    fn ln(&self) -> Self {
        Ext(self.0.ln())
    }
    fn exp(&self) -> Self {
        Ext(self.0.exp())
    }
    fn sqrt(&self) -> Self {
        Ext(self.0.sqrt())
    }
    fn unit_roundoff(&self) -> f64 {
        (2.0_f64).powi(-(self.precision().min(1000) as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::rational;

    #[test]
    fn one_third_times_three_is_one() {
        let third = Ext::from_rational(&rational(1, 3));
        let back = third * Ext::from_i64(3) - Ext::one();
        assert!(back.to_f64().abs() < 1e-35);
    }

    #[test]
    fn exp_inverts_ln() {
        let ten = Ext::from_i64(10);
        let err = (ten.ln().exp() - Ext::from_i64(10)).to_f64().abs();
        assert!(err < 1e-30, "{err}");
        let two = Ext::from_i64(2);
        assert!((two.sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn precision_follows_the_wider_operand() {
        let a = Ext::from_i64_bits(1, 400);
        let b = Ext::from_rational(&rational(1, 3));
        assert_eq!((a / b).precision(), 400);
    }

    #[test]
    fn ordering_matches_values() {
        let a = Ext::from_rational(&rational(1, 3));
        let b = Ext::from_rational(&rational(1, 2));
        assert!(a < b);
        assert!(-b.clone() < a);
        assert_eq!(a.clone(), a);
    }
}
