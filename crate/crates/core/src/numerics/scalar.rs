use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::number::{float_to_rational, rational_abs_f64, rational_to_f64};
use super::{Backend, Number};
use crate::error::{Error, Result};

/// Field operations shared by the float64 and exact rational backends.
///
/// Every evaluator in this crate is generic over `Scalar`, so a single code
/// path serves both the fast float check and the exact check.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Converts a tagged number into this backend. Floats entering the
    /// rational backend keep their shortest decimal value.
    fn from_number(n: &Number) -> Result<Self>;
    fn to_number(&self) -> Number;

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// `|self|` as a float, used only for stopping decisions and residuals.
    fn magnitude(&self) -> f64;

    /// The exact integer value, if there is one that fits in `i64`.
    fn to_integer(&self) -> Option<i64>;

    /// Integer power; negative exponents require a nonzero base.
    fn powi(&self, n: i64) -> Self;

    /// Real power, `None` when the result is not representable in this
    /// backend (non-integer exponent of a rational, negative float base).
    fn pow(&self, exponent: &Self) -> Option<Self>;

    /// `Some(n)` when `self == -n` for a nonnegative integer `n`.
    fn nonpositive_integer(&self) -> Option<u64> {
        self.to_integer().filter(|v| *v <= 0).map(|v| v.unsigned_abs())
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float64;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_number(n: &Number) -> Result<Self> {
        Ok(n.to_f64())
    }

    fn to_number(&self) -> Number {
        Number::Float(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_integer(&self) -> Option<i64> {
        (self.is_finite() && self.fract() == 0.0 && self.abs() < 9.0e18).then_some(*self as i64)
    }

    fn powi(&self, n: i64) -> Self {
        match i32::try_from(n) {
            Ok(n) => f64::powi(*self, n),
            Err(_) => self.powf(n as f64),
        }
    }

    fn pow(&self, exponent: &Self) -> Option<Self> {
        if let Some(n) = exponent.to_integer() {
            return Some(Scalar::powi(self, n));
        }
        (*self >= 0.0).then(|| self.powf(*exponent))
    }
}

impl Scalar for BigRational {
    const BACKEND: Backend = Backend::Rational;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_number(n: &Number) -> Result<Self> {
        match n {
            Number::Rational(q) => Ok(q.clone()),
            Number::Float(v) => float_to_rational(*v),
        }
    }

    fn to_number(&self) -> Number {
        Number::Rational(self.clone())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        rational_abs_f64(self)
    }

    fn to_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn powi(&self, n: i64) -> Self {
        let p = num_traits::pow(self.clone(), n.unsigned_abs() as usize);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    fn pow(&self, exponent: &Self) -> Option<Self> {
        let n = Scalar::to_integer(exponent)?;
        if n < 0 && Scalar::is_zero(self) {
            return None;
        }
        Some(Scalar::powi(self, n))
    }
}

/// `base^exponent`, failing when the backend cannot represent the result.
pub fn power<S: Scalar>(base: &S, exponent: &S) -> Result<S> {
    if base.is_zero() && exponent.to_f64() < 0.0 {
        return Err(Error::DenominatorPole(format!("0^({exponent})")));
    }
    base.pow(exponent).ok_or_else(|| Error::InexactPower {
        base: base.to_string(),
        exponent: exponent.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_detection() {
        assert_eq!((-3.0f64).nonpositive_integer(), Some(3));
        assert_eq!(0.0f64.nonpositive_integer(), Some(0));
        assert_eq!(2.0f64.nonpositive_integer(), None);
        assert_eq!((-2.5f64).nonpositive_integer(), None);
        assert_eq!(BigRational::from_ratio(-4, 2).nonpositive_integer(), Some(2));
        assert_eq!(BigRational::from_ratio(-1, 2).nonpositive_integer(), None);
    }

    #[test]
    fn powers() {
        let half = BigRational::from_ratio(1, 2);
        assert_eq!(power(&half, &BigRational::from_i64(-3)).unwrap(), BigRational::from_i64(8));
        assert!(matches!(
            power(&half, &BigRational::from_ratio(1, 2)),
            Err(Error::InexactPower { .. })
        ));
        assert!((power(&4.0f64, &0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(power(&-4.0f64, &0.5).is_err());
        assert_eq!(power(&-2.0f64, &3.0).unwrap(), -8.0);
    }
}
