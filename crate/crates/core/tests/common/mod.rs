//! Independent reference implementations used by the integration tests.
//! Nothing here calls the crate's evaluators.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trihyp::params::{Family, ParameterSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poch(x: f64, k: usize) -> f64 {
    (0..k).map(|j| x + j as f64).product()
}

pub fn poch_q(x: &BigRational, k: usize) -> BigRational {
    let mut out = BigRational::one();
    for j in 0..k {
        out *= x + BigRational::from_integer(j.into());
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Degree of family `f` at `(m1, m2, m3)`, spelled out per family.
fn degree(f: Family, m1: usize, m2: usize, m3: usize) -> usize {
    match f {
        Family::A | Family::E => m1 + m2 + m3,
        Family::B | Family::G => m1 + m2,
        Family::Bp | Family::Gp => m2 + m3,
        Family::Bpp | Family::Gpp => m3 + m1,
        Family::C | Family::H => m1,
        Family::Cp | Family::Hp => m2,
        Family::Cpp | Family::Hpp => m3,
    }
}

const NUMERATORS: [Family; 7] = [
    Family::A,
    Family::B,
    Family::Bp,
    Family::Bpp,
    Family::C,
    Family::Cp,
    Family::Cpp,
];
const DENOMINATORS: [Family; 7] = [
    Family::E,
    Family::G,
    Family::Gp,
    Family::Gpp,
    Family::H,
    Family::Hp,
    Family::Hpp,
];

/// Plain triple loop over `m1 + m2 + m3 <= max_degree`, every coefficient
/// recomputed from scratch.
pub fn naive_f3(ps: &ParameterSet<f64>, x: [f64; 3], max_degree: usize) -> f64 {
    let mut sum = 0.0;
    for m1 in 0..=max_degree {
        for m2 in 0..=max_degree - m1 {
            for m3 in 0..=max_degree - m1 - m2 {
                let mut term = 1.0;
                for f in NUMERATORS {
                    for v in ps.family(f) {
                        term *= poch(*v, degree(f, m1, m2, m3));
                    }
                }
                for f in DENOMINATORS {
                    for v in ps.family(f) {
                        term /= poch(*v, degree(f, m1, m2, m3));
                    }
                }
                term *= x[0].powi(m1 as i32) * x[1].powi(m2 as i32) * x[2].powi(m3 as i32);
                term /= factorial(m1) * factorial(m2) * factorial(m3);
                sum += term;
            }
        }
    }
    sum
}

fn triple_sum(max_degree: usize, term: impl Fn(usize, usize, usize) -> f64) -> f64 {
    let mut sum = 0.0;
    for m1 in 0..=max_degree {
        for m2 in 0..=max_degree - m1 {
            for m3 in 0..=max_degree - m1 - m2 {
                sum += term(m1, m2, m3);
            }
        }
    }
    sum
}

fn monomial(x: [f64; 3], m1: usize, m2: usize, m3: usize) -> f64 {
    x[0].powi(m1 as i32) * x[1].powi(m2 as i32) * x[2].powi(m3 as i32)
        / (factorial(m1) * factorial(m2) * factorial(m3))
}

/// Lauricella `F_A`: `(a)_{m1+m2+m3} prod (b_j)_{m_j} / prod (c_j)_{m_j}`.
pub fn lauricella_a(a: f64, b: [f64; 3], c: [f64; 3], x: [f64; 3], max_degree: usize) -> f64 {
    triple_sum(max_degree, |m1, m2, m3| {
        let m = [m1, m2, m3];
        let mut t = poch(a, m1 + m2 + m3);
        for j in 0..3 {
            t *= poch(b[j], m[j]) / poch(c[j], m[j]);
        }
        t * monomial(x, m1, m2, m3)
    })
}

/// Lauricella `F_D`: `(a)_{m1+m2+m3} prod (b_j)_{m_j} / (c)_{m1+m2+m3}`.
pub fn lauricella_d(a: f64, b: [f64; 3], c: f64, x: [f64; 3], max_degree: usize) -> f64 {
    triple_sum(max_degree, |m1, m2, m3| {
        let total = m1 + m2 + m3;
        poch(a, total) * poch(b[0], m1) * poch(b[1], m2) * poch(b[2], m3) / poch(c, total)
            * monomial(x, m1, m2, m3)
    })
}

/// Srivastava's `H_A`:
/// `(a)_{m1+m3} (b1)_{m1+m2} (b2)_{m2+m3} / ((c1)_{m1} (c2)_{m2+m3})`.
pub fn srivastava_h_a(a: f64, b1: f64, b2: f64, c1: f64, c2: f64, x: [f64; 3], max_degree: usize) -> f64 {
    triple_sum(max_degree, |m1, m2, m3| {
        poch(a, m1 + m3) * poch(b1, m1 + m2) * poch(b2, m2 + m3) / (poch(c1, m1) * poch(c2, m2 + m3))
            * monomial(x, m1, m2, m3)
    })
}

/// `sum_{k=0}^{n} prod (num)_k / prod (den)_k * z^k / k!` in exact arithmetic.
pub fn terminating_pfq(num: &[BigRational], den: &[BigRational], z: &BigRational, n: usize) -> BigRational {
    let mut sum = BigRational::zero();
    let mut z_k = BigRational::one();
    let mut k_fact = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            z_k *= z;
            k_fact *= BigRational::from_integer(k.into());
        }
        let mut t = z_k.clone() / &k_fact;
        for a in num {
            t *= poch_q(a, k);
        }
        for b in den {
            t /= poch_q(b, k);
        }
        sum += t;
    }
    sum
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Numerator minus denominator entries whose degree grows with `m_j`.
pub fn excess(ps: &ParameterSet<f64>, j: usize) -> isize {
    let mut m = [0; 3];
    m[j] = 1;
    let count = |families: [Family; 7]| -> isize {
        families
            .into_iter()
            .filter(|&f| degree(f, m[0], m[1], m[2]) == 1)
            .map(|f| ps.family(f).len() as isize)
            .sum()
    };
    count(NUMERATORS) - count(DENOMINATORS)
}

/// Family lengths at most 2, values in `[0.3, 2.5]`, and no surplus of
/// numerator parameters along any index, so the series converges near the
/// origin.
pub fn random_parameter_set(rng: &mut ChaCha8Rng) -> ParameterSet<f64> {
    loop {
        let mut ps = ParameterSet::new();
        for f in Family::ALL {
            let len = rng.gen_range(0..=2);
            ps = ps.with(f, (0..len).map(|_| uniform(rng, 0.3, 2.5)).collect::<Vec<_>>());
        }
        if (0..3).all(|j| excess(&ps, j) <= 0) {
            return ps;
        }
    }
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
