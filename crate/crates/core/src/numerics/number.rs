use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic backend of a [`Number`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float64,
    Rational,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Float64 => f.write_str("float64"),
            Backend::Rational => f.write_str("rational"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float64" | "float" | "f64" => Ok(Backend::Float64),
            "rational" | "exact" => Ok(Backend::Rational),
            other => Err(Error::Parse(format!("unknown backend '{other}'"))),
        }
    }
}

/// A scalar tagged with its backend.
///
/// This is the dynamically typed value used at the I/O boundary (JSON files,
/// CLI arguments). Arithmetic between two different backends is an error;
/// the evaluators themselves are generic over [`crate::numerics::Scalar`].
///
/// In JSON a float is a number and a rational is a `"p/q"` string.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Float(f64),
    Rational(BigRational),
}

impl Number {
    pub fn backend(&self) -> Backend {
        match self {
            Number::Float(_) => Backend::Float64,
            Number::Rational(_) => Backend::Rational,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Float(v) => *v,
            Number::Rational(q) => rational_to_f64(q),
        }
    }

    pub fn checked_add(&self, other: &Number) -> Result<Number> {
        self.combine(other, |a, b| a + b, |a, b| Ok(a + b))
    }

    pub fn checked_sub(&self, other: &Number) -> Result<Number> {
        self.combine(other, |a, b| a - b, |a, b| Ok(a - b))
    }

    pub fn checked_mul(&self, other: &Number) -> Result<Number> {
        self.combine(other, |a, b| a * b, |a, b| Ok(a * b))
    }

    pub fn checked_div(&self, other: &Number) -> Result<Number> {
        self.combine(
            other,
            |a, b| a / b,
            |a, b| {
                if b.is_zero() {
                    Err(Error::DenominatorPole("rational division by zero".into()))
                } else {
                    Ok(a / b)
                }
            },
        )
    }

    fn combine(
        &self,
        other: &Number,
        float: impl FnOnce(f64, f64) -> f64,
        exact: impl FnOnce(&BigRational, &BigRational) -> Result<BigRational>,
    ) -> Result<Number> {
        match (self, other) {
            (Number::Float(a), Number::Float(b)) => Ok(Number::Float(float(*a, *b))),
            (Number::Rational(a), Number::Rational(b)) => exact(a, b).map(Number::Rational),
            _ => Err(Error::MixedBackends),
        }
    }

    /// Converts to the requested backend. Floats become the rational with the
    /// same shortest decimal expansion, so `0.1` maps to `1/10`.
    pub fn to_backend(&self, backend: Backend) -> Result<Number> {
        match (self, backend) {
            (Number::Float(v), Backend::Rational) => float_to_rational(*v).map(Number::Rational),
            (Number::Rational(q), Backend::Float64) => Ok(Number::Float(rational_to_f64(q))),
            _ => Ok(self.clone()),
        }
    }
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::Float(v)
    }
}

impl From<BigRational> for Number {
    fn from(q: BigRational) -> Self {
        Number::Rational(q)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Float(v) => write!(f, "{v}"),
            Number::Rational(q) => write!(f, "{q}"),
        }
    }
}

/// Parses `"p/q"`, an integer, or a decimal such as `"-1.25e-3"`.
/// Strings always produce a rational; use a JSON number for a float.
impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Number::Rational)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

pub(crate) fn float_to_rational(v: f64) -> Result<BigRational> {
    if !v.is_finite() {
        return Err(Error::Parse(format!("{v} has no rational value")));
    }
    parse_rational(&format!("{v:e}"))
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("'{s}' is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("'{s}' has a zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (
            &s[..pos],
            s[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Number::Float(v) => serializer.serialize_f64(*v),
            Number::Rational(q) => {
                let text = if q.denom().is_one() {
                    format!("{}/1", q.numer())
                } else {
                    q.to_string()
                };
                serializer.serialize_str(&text)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct NumberVisitor;

        impl Visitor<'_> for NumberVisitor {
            type Value = Number;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Number, E> {
                Ok(Number::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Number, E> {
                Ok(Number::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Number, E> {
                Ok(Number::Float(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Number, E> {
                Number::from_str(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(NumberVisitor)
    }
}

pub(crate) fn rational_abs_f64(q: &BigRational) -> f64 {
    rational_to_f64(&q.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn mixing_backends_is_an_error() {
        let a = Number::Float(1.0);
        let b = Number::Rational(q(1, 2));
        assert_eq!(a.checked_add(&b), Err(Error::MixedBackends));
        assert_eq!(b.checked_mul(&a), Err(Error::MixedBackends));
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let third = Number::Rational(q(1, 3));
        let sum = third.checked_add(&third).unwrap().checked_add(&third).unwrap();
        assert_eq!(sum, Number::Rational(q(1, 1)));
        assert!(third.checked_div(&Number::Rational(q(0, 1))).is_err());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-1.25e-2").unwrap(), q(-1, 80));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn float_to_rational_uses_shortest_decimal() {
        assert_eq!(float_to_rational(0.1).unwrap(), q(1, 10));
        assert_eq!(float_to_rational(-2.5).unwrap(), q(-5, 2));
        assert!(float_to_rational(f64::NAN).is_err());
    }

    #[test]
    fn json_forms() {
        let v: Vec<Number> = serde_json::from_str(r#"[0.5, 2, "1/3"]"#).unwrap();
        assert_eq!(v[0], Number::Float(0.5));
        assert_eq!(v[1], Number::Float(2.0));
        assert_eq!(v[2], Number::Rational(q(1, 3)));
        let out = serde_json::to_string(&vec![Number::Float(0.1), Number::Rational(q(2, 1))]).unwrap();
        assert_eq!(out, r#"[0.1,"2/1"]"#);
    }
}
