//! Classical closed forms for the inner one-variable sums.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{pochhammer, power, Scalar};

fn nonzero<S: Scalar>(value: S, what: &str) -> Result<S> {
    if value.is_zero() {
        Err(Error::DenominatorPole(what.to_string()))
    } else {
        Ok(value)
    }
}

/// `1F0[a; -; t] = (1 - t)^(-a)`.
///
/// The rational backend needs an integer `a`.
pub fn binomial_1f0<S: Scalar>(a: &S, t: &S) -> Result<S> {
    let base = S::one() - t;
    if base.is_zero() {
        return Err(Error::PoleAtOne);
    }
    power(&base, &-a.clone())
}

/// Vandermonde: `2F1[-n, a; c; 1] = (c-a)_n / (c)_n`.
pub fn vandermonde_2f1<S: Scalar>(n: usize, a: &S, c: &S) -> Result<S> {
    let den = nonzero(pochhammer(c, n), "(c)_n")?;
    Ok(pochhammer(&(c.clone() - a), n) / den)
}

/// Saalschütz: `3F2[-n, a, b; c, 1+a+b-c-n; 1] = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)`.
pub fn saalschutz_3f2<S: Scalar>(n: usize, a: &S, b: &S, c: &S) -> Result<S> {
    let den = nonzero(pochhammer(c, n), "(c)_n")?
        * nonzero(pochhammer(&(c.clone() - a - b), n), "(c-a-b)_n")?;
    let num = pochhammer(&(c.clone() - a), n) * pochhammer(&(c.clone() - b), n);
    Ok(num / den)
}

/// Nearly-poised: `3F2[-n, a, 1+a/2; a/2, b; 1] = (b-a-1-n) (b-a)_{n-1} / (b)_n`,
/// where for `n = 0` the factor `(b-a)_{-1}` reads `1/(b-a-1)`.
pub fn nearly_poised_3f2<S: Scalar>(n: usize, a: &S, b: &S) -> Result<S> {
    let b_minus_a = b.clone() - a;
    if n == 0 {
        nonzero(b_minus_a - S::one(), "b-a-1")?;
        return Ok(S::one());
    }
    let den = nonzero(pochhammer(b, n), "(b)_n")?;
    let lead = b_minus_a.clone() - S::from_i64(n as i64 + 1);
    Ok(lead * pochhammer(&b_minus_a, n - 1) / den)
}

/// `3F2[-n, a, b; 1+a-b, 1+2b-n; 1]
///   = (a-2b)_n (1+a/2-b)_n (-b)_n / ((1+a-b)_n (a/2-b)_n (-2b)_n)`.
pub fn twob_balanced_3f2<S: Scalar>(n: usize, a: &S, b: &S) -> Result<S> {
    let two_b = b.clone() + b;
    let half_a = a.clone() / S::from_i64(2);
    let den = nonzero(pochhammer(&(S::one() + a - b), n), "(1+a-b)_n")?
        * nonzero(pochhammer(&(half_a.clone() - b), n), "(a/2-b)_n")?
        * nonzero(pochhammer(&-two_b.clone(), n), "(-2b)_n")?;
    let num = pochhammer(&(a.clone() - &two_b), n)
        * pochhammer(&(S::one() + &half_a - b), n)
        * pochhammer(&-b.clone(), n);
    Ok(num / den)
}

/// `4F3[-n, a, 1+a/2, b; a/2, 1+a-b, 1+2b-n; 1]
///   = (a-2b)_n (-b)_n / ((1+a-b)_n (-2b)_n)`.
pub fn watson_4f3<S: Scalar>(n: usize, a: &S, b: &S) -> Result<S> {
    let two_b = b.clone() + b;
    let den = nonzero(pochhammer(&(S::one() + a - b), n), "(1+a-b)_n")?
        * nonzero(pochhammer(&-two_b.clone(), n), "(-2b)_n")?;
    Ok(pochhammer(&(a.clone() - &two_b), n) * pochhammer(&-b.clone(), n) / den)
}

/// The closed forms above as a uniform family: terminating series on one
/// side, closed form on the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    Binomial,
    Vandermonde,
    Saalschutz,
    NearlyPoised,
    TwoBBalanced,
    Watson,
}

/// A terminating `pFq` instance: numerators, denominators and argument.
pub type SeriesParams<S> = (Vec<S>, Vec<S>, S);

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Binomial,
        Lemma::Vandermonde,
        Lemma::Saalschutz,
        Lemma::NearlyPoised,
        Lemma::TwoBBalanced,
        Lemma::Watson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Binomial => "binomial_1f0",
            Lemma::Vandermonde => "vandermonde_2f1",
            Lemma::Saalschutz => "saalschutz_3f2",
            Lemma::NearlyPoised => "nearly_poised_3f2",
            Lemma::TwoBBalanced => "twob_balanced_3f2",
            Lemma::Watson => "watson_4f3",
        }
    }

    /// Number of free parameters after `n`: `t` for the binomial case,
    /// `(a, c)`, `(a, b, c)` or `(a, b)` for the others.
    pub fn arity(self) -> usize {
        match self {
            Lemma::Binomial => 1,
            Lemma::Vandermonde => 2,
            Lemma::Saalschutz => 3,
            Lemma::NearlyPoised | Lemma::TwoBBalanced | Lemma::Watson => 2,
        }
    }

    fn check_arity<S>(self, p: &[S]) -> Result<()> {
        if p.len() == self.arity() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                self.arity(),
                p.len()
            )))
        }
    }

    pub fn closed_form<S: Scalar>(self, n: usize, p: &[S]) -> Result<S> {
        self.check_arity(p)?;
        match self {
            Lemma::Binomial => binomial_1f0(&-S::from_i64(n as i64), &p[0]),
            Lemma::Vandermonde => vandermonde_2f1(n, &p[0], &p[1]),
            Lemma::Saalschutz => saalschutz_3f2(n, &p[0], &p[1], &p[2]),
            Lemma::NearlyPoised => nearly_poised_3f2(n, &p[0], &p[1]),
            Lemma::TwoBBalanced => twob_balanced_3f2(n, &p[0], &p[1]),
            Lemma::Watson => watson_4f3(n, &p[0], &p[1]),
        }
    }

    /// The terminating series whose sum the closed form gives.
    pub fn series<S: Scalar>(self, n: usize, p: &[S]) -> Result<SeriesParams<S>> {
        self.check_arity(p)?;
        let minus_n = -S::from_i64(n as i64);
        let one = S::one();
        let two = S::from_i64(2);
        Ok(match self {
            Lemma::Binomial => (vec![minus_n], vec![], p[0].clone()),
            Lemma::Vandermonde => (vec![minus_n, p[0].clone()], vec![p[1].clone()], one),
            Lemma::Saalschutz => {
                let (a, b, c) = (&p[0], &p[1], &p[2]);
                let lower = one.clone() + a + b - c + &minus_n;
                (vec![minus_n, a.clone(), b.clone()], vec![c.clone(), lower], one)
            }
            Lemma::NearlyPoised => {
                let (a, b) = (&p[0], &p[1]);
                let half = a.clone() / &two;
                (
                    vec![minus_n, a.clone(), one.clone() + &half],
                    vec![half, b.clone()],
                    one,
                )
            }
            Lemma::TwoBBalanced => {
                let (a, b) = (&p[0], &p[1]);
                (
                    vec![minus_n.clone(), a.clone(), b.clone()],
                    vec![one.clone() + a - b, one.clone() + b + b + &minus_n],
                    one,
                )
            }
            Lemma::Watson => {
                let (a, b) = (&p[0], &p[1]);
                let half = a.clone() / &two;
                (
                    vec![minus_n.clone(), a.clone(), one.clone() + &half, b.clone()],
                    vec![half, one.clone() + a - b, one.clone() + b + b + &minus_n],
                    one,
                )
            }
        })
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown lemma '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_sum, TruncationPolicy};
    use crate::series::eval_pfq;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::from_ratio(p, d)
    }

    #[test]
    fn binomial_cases() {
        assert!((binomial_1f0(&2.0, &0.5).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(binomial_1f0(&1.7, &0.0).unwrap(), 1.0);
        assert!((binomial_1f0(&-1.0, &0.3).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(binomial_1f0(&2.0, &1.0), Err(Error::PoleAtOne));
        assert_eq!(binomial_1f0(&q(-2, 1), &q(1, 2)).unwrap(), q(1, 4));
        assert!(matches!(binomial_1f0(&q(1, 2), &q(1, 2)), Err(Error::InexactPower { .. })));
    }

    #[test]
    fn binomial_matches_adaptive_sum() {
        let policy = TruncationPolicy::new(1e-15, 200, 2).unwrap();
        let r = adaptive_sum(|k| pochhammer(&2.0, k) / pochhammer(&1.0, k) * 0.2f64.powi(k as i32), &policy);
        let closed = binomial_1f0(&2.0, &0.2).unwrap();
        assert!((closed - 1.5625).abs() < 1e-15);
        assert!((r.value - closed).abs() < 1e-14);
    }

    #[test]
    fn vandermonde_cases() {
        assert_eq!(vandermonde_2f1(2, &q(1, 1), &q(3, 1)).unwrap(), q(1, 2));
        assert_eq!(vandermonde_2f1(0, &q(5, 7), &q(-3, 2)).unwrap(), q(1, 1));
        assert_eq!(vandermonde_2f1(3, &q(5, 2), &q(5, 2)).unwrap(), q(0, 1));
        assert!(vandermonde_2f1(2, &q(1, 1), &q(-1, 1)).is_err());
    }

    #[test]
    fn saalschutz_cases() {
        assert_eq!(saalschutz_3f2(1, &q(1, 1), &q(2, 1), &q(4, 1)).unwrap(), q(3, 2));
        assert_eq!(saalschutz_3f2(0, &q(1, 3), &q(2, 5), &q(7, 2)).unwrap(), q(1, 1));
        assert_eq!(saalschutz_3f2(1, &q(4, 1), &q(2, 1), &q(4, 1)).unwrap(), q(0, 1));
    }

    #[test]
    fn nearly_poised_cases() {
        assert_eq!(nearly_poised_3f2(0, &q(1, 3), &q(5, 2)).unwrap(), q(1, 1));
        assert!(nearly_poised_3f2(0, &q(1, 1), &q(2, 1)).is_err());
        assert_eq!(nearly_poised_3f2(1, &q(1, 1), &q(4, 1)).unwrap(), q(1, 4));
        assert_eq!(nearly_poised_3f2(1, &q(3, 2), &q(7, 2)).unwrap(), q(0, 1));
    }

    #[test]
    fn balanced_and_watson_cases() {
        assert!((twob_balanced_3f2(1, &2.0, &0.5).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(twob_balanced_3f2(0, &q(3, 7), &q(2, 9)).unwrap(), q(1, 1));
        assert!(twob_balanced_3f2(1, &q(1, 1), &q(1, 2)).is_err());
        assert!((watson_4f3(1, &2.0, &0.5).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(watson_4f3(0, &q(3, 7), &q(2, 9)).unwrap(), q(1, 1));
        assert_eq!(watson_4f3(1, &q(1, 1), &q(1, 2)).unwrap(), q(0, 1));
    }

    #[test]
    fn closed_forms_match_series_for_fixed_inputs() {
        let policy = TruncationPolicy::new(1e-15, 40, 2).unwrap();
        let params = [q(2, 7), q(-11, 3), q(5, 4)];
        for lemma in Lemma::ALL {
            for n in 0..8 {
                let p = &params[..lemma.arity()];
                let (num, den, z) = lemma.series(n, p).unwrap();
                let series = eval_pfq(&num, &den, &z, &policy).unwrap();
                assert!(series.terminated_exactly);
                assert_eq!(series.value, lemma.closed_form(n, p).unwrap(), "{lemma} n={n}");
            }
        }
    }
}
