//! The triple series `F^(3)[x1, x2, x3]` and one-variable `pFq` series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{pochhammer, EvaluationResult, Number, Scalar, StallMonitor, TruncationPolicy};
use crate::params::{Family, IndexCombo, ParameterSet};

/// Arguments `(x1, x2, x3)` of the triple series.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentTriple<S> {
    pub x1: S,
    pub x2: S,
    pub x3: S,
}

impl<S> ArgumentTriple<S> {
    pub fn new(x1: S, x2: S, x3: S) -> Self {
        Self { x1, x2, x3 }
    }
}

impl<S: Scalar> ArgumentTriple<S> {
    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    pub fn get(&self, index: usize) -> &S {
        match index {
            0 => &self.x1,
            1 => &self.x2,
            2 => &self.x3,
            _ => panic!("argument index {index} out of range"),
        }
    }

    pub fn to_number(&self) -> ArgumentTriple<Number> {
        ArgumentTriple {
            x1: self.x1.to_number(),
            x2: self.x2.to_number(),
            x3: self.x3.to_number(),
        }
    }

    pub fn from_number(args: &ArgumentTriple<Number>) -> Result<Self> {
        Ok(Self::new(
            S::from_number(&args.x1)?,
            S::from_number(&args.x2)?,
            S::from_number(&args.x3)?,
        ))
    }
}

/// JSON form is a three-element array.
impl Serialize for ArgumentTriple<Number> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        [&self.x1, &self.x2, &self.x3].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ArgumentTriple<Number> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [x1, x2, x3] = <[Number; 3]>::deserialize(deserializer)?;
        Ok(ArgumentTriple { x1, x2, x3 })
    }
}

/// Coefficient `Λ(m1, m2, m3)`: the ratio of numerator to denominator
/// Pochhammer products, each family raised along its index combination.
pub fn lambda_coeff<S: Scalar>(ps: &ParameterSet<S>, m1: usize, m2: usize, m3: usize) -> Result<S> {
    let m = [m1, m2, m3];
    let mut numer = S::one();
    let mut denom = S::one();
    for (family, v) in ps.entries() {
        let p = pochhammer(v, family.combo().degree(m));
        if family.is_numerator() {
            numer = numer * p;
        } else if p.is_zero() {
            return Err(Error::DenominatorPole(format!(
                "({family} entry {v}) at (m1, m2, m3) = ({m1}, {m2}, {m3})"
            )));
        } else {
            denom = denom * p;
        }
    }
    Ok(numer / denom)
}

/// Running products of the Pochhammer ratios of one index combination,
/// `values[n] = prod (num)_n / prod (den)_n`, built by ratio updates.
struct ComboTable<S> {
    values: Vec<S>,
    /// First `n` at which a denominator symbol vanishes.
    pole_at: Option<usize>,
    combo: IndexCombo,
}

impl<S: Scalar> ComboTable<S> {
    fn build(ps: &ParameterSet<S>, combo: IndexCombo, arg: Option<&S>, len: usize) -> Self {
        let numer: Vec<&S> = ps
            .entries()
            .filter(|(f, _)| f.combo() == combo && f.is_numerator())
            .map(|(_, v)| v)
            .collect();
        let denom: Vec<&S> = ps
            .entries()
            .filter(|(f, _)| f.combo() == combo && !f.is_numerator())
            .map(|(_, v)| v)
            .collect();

        let mut values = Vec::with_capacity(len + 1);
        let mut current = S::one();
        values.push(current.clone());
        let mut pole_at = None;
        for n in 0..len {
            let shift = S::from_i64(n as i64);
            let mut up = S::one();
            for v in &numer {
                up = up * ((*v).clone() + &shift);
            }
            if let Some(x) = arg {
                up = up * x;
            }
            if up.is_zero() {
                values.resize(len + 1, S::zero());
                break;
            }
            let mut down = S::one();
            for v in &denom {
                down = down * ((*v).clone() + &shift);
            }
            if arg.is_some() {
                down = down * S::from_i64(n as i64 + 1);
            }
            if down.is_zero() {
                pole_at = Some(n + 1);
                break;
            }
            current = current * up / down;
            values.push(current.clone());
        }
        Self {
            values,
            pole_at,
            combo,
        }
    }

    fn get(&self, n: usize, m: [usize; 3]) -> Result<&S> {
        if self.pole_at.is_some_and(|p| n >= p) {
            return Err(Error::DenominatorPole(format!(
                "{:?} denominator vanishes at (m1, m2, m3) = ({}, {}, {})",
                self.combo, m[0], m[1], m[2]
            )));
        }
        Ok(&self.values[n])
    }
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    Some(a? + b?)
}

/// Lattice region outside of which every term vanishes.
struct Region {
    /// Per-combo bound on the combo degree, indexed by `IndexCombo::slot`.
    bounds: [Option<u64>; 7],
    /// Upper bound on `m1 + m2 + m3` over the region.
    max_degree: Option<u64>,
}

impl Region {
    fn new<S: Scalar>(ps: &ParameterSet<S>, args: &ArgumentTriple<S>) -> Self {
        let mut bounds = IndexCombo::ALL.map(|c| ps.termination_bound(c));
        for (j, combo) in [IndexCombo::First, IndexCombo::Second, IndexCombo::Third]
            .into_iter()
            .enumerate()
        {
            if args.get(j).is_zero() {
                bounds[combo.slot()] = Some(0);
            }
        }
        let mut region = Self {
            bounds,
            max_degree: None,
        };
        region.refresh();
        region
    }

    fn refresh(&mut self) {
        let bounds = self.bounds;
        let b = |c: IndexCombo| bounds[c.slot()];
        let (u1, u2, u3) = (b(IndexCombo::First), b(IndexCombo::Second), b(IndexCombo::Third));
        self.max_degree = [
            b(IndexCombo::Total),
            add_opt(add_opt(u1, u2), u3),
            add_opt(b(IndexCombo::Pair12), u3),
            add_opt(b(IndexCombo::Pair23), u1),
            add_opt(b(IndexCombo::Pair31), u2),
        ]
        .into_iter()
        .fold(None, min_opt);
    }

    fn bound(&self, combo: IndexCombo) -> Option<u64> {
        self.bounds[combo.slot()]
    }

    fn contains(&self, m: [usize; 3]) -> bool {
        IndexCombo::ALL
            .iter()
            .all(|c| self.bound(*c).is_none_or(|n| c.degree(m) as u64 <= n))
    }

    /// Table length needed for `combo` when summing up to total degree `cap`.
    fn table_len(&self, combo: IndexCombo, cap: usize) -> usize {
        let mut len = min_opt(self.bound(combo), Some(cap as u64));
        if combo != IndexCombo::Total {
            let mask = combo.mask();
            let singles = [IndexCombo::First, IndexCombo::Second, IndexCombo::Third];
            let sum = (0..3)
                .filter(|&j| mask[j])
                .map(|j| self.bound(singles[j]))
                .fold(Some(0), add_opt);
            len = min_opt(len, sum);
        }
        len.unwrap_or(cap as u64) as usize
    }
}

/// Evaluates `F^(3)[x1, x2, x3]` shell by shell.
///
/// Shell `s` collects the terms with `m1 + m2 + m3 = s`, visited with `m1`
/// major and `m3` minor. The stall rule of `policy` is applied to the sum of
/// absolute values of each shell. When numerator parameters (or zero
/// arguments) confine the nonzero terms to a region of total degree at most
/// `policy.max_total_degree`, the whole region is summed and the result is
/// marked `terminated_exactly`.
pub fn eval_f3<S: Scalar>(
    ps: &ParameterSet<S>,
    args: &ArgumentTriple<S>,
    policy: &TruncationPolicy,
) -> Result<EvaluationResult<S>> {
    eval_f3_graded(ps, args, None, policy)
}

/// Like [`eval_f3`], but each term is multiplied by `first_weights[m1]`;
/// terms with `m1 >= first_weights.len()` are dropped.
pub(crate) fn eval_f3_graded<S: Scalar>(
    ps: &ParameterSet<S>,
    args: &ArgumentTriple<S>,
    first_weights: Option<&[S]>,
    policy: &TruncationPolicy,
) -> Result<EvaluationResult<S>> {
    policy.validate()?;
    let mut region = Region::new(ps, args);
    if let Some(w) = first_weights {
        assert!(!w.is_empty(), "first_weights must not be empty");
        let slot = IndexCombo::First.slot();
        let limit = w.len().checked_sub(1).map(|n| n as u64);
        region.bounds[slot] = min_opt(region.bounds[slot], limit);
        region.refresh();
    }
    let cap = policy.max_total_degree;
    let exhaustive = region.max_degree.is_some_and(|d| d <= cap as u64);
    let last_shell = match region.max_degree {
        Some(d) if exhaustive => d as usize,
        _ => cap,
    };

    let singles = [IndexCombo::First, IndexCombo::Second, IndexCombo::Third];
    let tables: Vec<ComboTable<S>> = IndexCombo::ALL
        .iter()
        .map(|&combo| {
            let arg = singles.iter().position(|c| *c == combo).map(|j| args.get(j));
            ComboTable::build(ps, combo, arg, region.table_len(combo, last_shell))
        })
        .collect();
    let u: [usize; 3] = singles.map(|c| region.bound(c).map_or(usize::MAX, |n| n as usize));

    let first_active = first_weights.map_or(0, |w| w.len() - 1);
    let mut monitor = StallMonitor::new(policy);
    let mut sum = S::zero();
    let mut last_magnitude = 0.0;
    for s in 0..=last_shell {
        let mut shell = S::zero();
        let mut magnitude = 0.0;
        for m1 in 0..=s.min(u[0]) {
            for m2 in 0..=(s - m1).min(u[1]) {
                let m = [m1, m2, s - m1 - m2];
                if !region.contains(m) {
                    continue;
                }
                let mut term = match first_weights {
                    Some(w) => w[m1].clone(),
                    None => S::one(),
                };
                for table in &tables {
                    term = term * table.get(table.combo.degree(m), m)?;
                }
                magnitude += term.magnitude();
                shell = shell + term;
            }
        }
        sum = sum + shell;
        last_magnitude = magnitude;
        if exhaustive || s < first_active {
            continue;
        }
        let partial = sum.magnitude();
        if !partial.is_finite() {
            return Ok(EvaluationResult {
                value: sum,
                shells_used: s + 1,
                last_shell_magnitude: magnitude,
                converged: false,
                terminated_exactly: false,
            });
        }
        if monitor.observe(magnitude, partial) {
            return Ok(EvaluationResult {
                value: sum,
                shells_used: s + 1,
                last_shell_magnitude: magnitude,
                converged: true,
                terminated_exactly: false,
            });
        }
    }
    Ok(EvaluationResult {
        value: sum,
        shells_used: last_shell + 1,
        last_shell_magnitude: last_magnitude,
        converged: exhaustive,
        terminated_exactly: exhaustive,
    })
}

/// Evaluates `pFq[numerators; denominators; z] = sum_k [num]_k / [den]_k z^k / k!`.
pub fn eval_pfq<S: Scalar>(
    numerators: &[S],
    denominators: &[S],
    z: &S,
    policy: &TruncationPolicy,
) -> Result<EvaluationResult<S>> {
    policy.validate()?;
    let mut bound = numerators.iter().filter_map(Scalar::nonpositive_integer).min();
    if z.is_zero() {
        bound = Some(0);
    }
    let cap = policy.max_total_degree;
    let exhaustive = bound.is_some_and(|n| n <= cap as u64);
    let last = match bound {
        Some(n) if exhaustive => n as usize,
        _ => cap,
    };

    let mut monitor = StallMonitor::new(policy);
    let mut term = S::one();
    let mut sum = S::zero();
    for k in 0..=last {
        if k > 0 {
            let shift = S::from_i64(k as i64 - 1);
            let mut down = S::from_i64(k as i64);
            for b in denominators {
                let f = b.clone() + &shift;
                if f.is_zero() {
                    return Err(Error::DenominatorPole(format!(
                        "denominator parameter {b} at term {k}"
                    )));
                }
                down = down * f;
            }
            let mut up = z.clone();
            for a in numerators {
                up = up * (a.clone() + &shift);
            }
            term = term * up / down;
        }
        let magnitude = term.magnitude();
        sum = sum + &term;
        if exhaustive {
            continue;
        }
        let partial = sum.magnitude();
        let stop = !partial.is_finite() || monitor.observe(magnitude, partial);
        if stop {
            return Ok(EvaluationResult {
                value: sum,
                shells_used: k + 1,
                last_shell_magnitude: magnitude,
                converged: partial.is_finite(),
                terminated_exactly: false,
            });
        }
    }
    Ok(EvaluationResult {
        value: sum,
        shells_used: last + 1,
        last_shell_magnitude: term.magnitude(),
        converged: exhaustive,
        terminated_exactly: exhaustive,
    })
}

/// The numerator families, for callers that build parameter sets by role.
pub const NUMERATOR_FAMILIES: [Family; 7] = [
    Family::A,
    Family::B,
    Family::Bp,
    Family::Bpp,
    Family::C,
    Family::Cp,
    Family::Cpp,
];

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(1e-16, 80, 2).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::from_ratio(p, d)
    }

    #[test]
    fn lambda_examples() {
        let empty = ParameterSet::<f64>::new();
        assert_eq!(lambda_coeff(&empty, 3, 1, 4).unwrap(), 1.0);
        let a1 = ParameterSet::<f64>::new().with(Family::A, [1.0]);
        assert_eq!(lambda_coeff(&a1, 1, 1, 0).unwrap(), 2.0);
        let ae = ParameterSet::new().with(Family::A, [q(2, 1)]).with(Family::E, [q(3, 1)]);
        assert_eq!(lambda_coeff(&ae, 1, 0, 1).unwrap(), q(1, 2));
        let pole = ParameterSet::<f64>::new().with(Family::Hp, [-1.0]);
        assert!(matches!(lambda_coeff(&pole, 0, 2, 0), Err(Error::DenominatorPole(_))));
        assert_eq!(lambda_coeff(&pole, 5, 1, 5).unwrap(), 1.0 / -1.0);
    }

    #[test]
    fn zero_arguments_give_one() {
        let ps = ParameterSet::<f64>::new()
            .with(Family::A, [1.3])
            .with(Family::G, [0.7])
            .with(Family::Cp, [2.0]);
        let r = eval_f3(&ps, &ArgumentTriple::zero(), &policy()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.terminated_exactly && r.converged);
        assert_eq!(r.shells_used, 1);
    }

    #[test]
    fn geometric_in_total_degree() {
        let ps = ParameterSet::<f64>::new().with(Family::A, [1.0]);
        let r = eval_f3(&ps, &ArgumentTriple::new(0.1, 0.1, 0.1), &policy()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0 / 0.7).abs() < 1e-13);
    }

    #[test]
    fn terminating_first_index() {
        let ps = ParameterSet::<f64>::new().with(Family::C, [-2.0]);
        let r = eval_f3(&ps, &ArgumentTriple::new(0.5, 0.0, 0.0), &policy()).unwrap();
        assert_eq!(r.value, 0.25);
        assert!(r.terminated_exactly);

        let exact = ParameterSet::new().with(Family::C, [q(-2, 1)]);
        let r = eval_f3(&exact, &ArgumentTriple::new(q(1, 2), q(0, 1), q(0, 1)), &policy()).unwrap();
        assert_eq!(r.value, q(1, 4));
        assert!(r.terminated_exactly);
    }

    #[test]
    fn pole_beyond_termination_is_not_reached() {
        let ps = ParameterSet::<f64>::new()
            .with(Family::C, [-2.0])
            .with(Family::H, [-5.0]);
        let r = eval_f3(&ps, &ArgumentTriple::new(0.5, 0.0, 0.0), &policy()).unwrap();
        // 1 + (-2)(0.5)/(-5) + (-2)(-1)(0.25)/((-5)(-4)*2)
        assert!((r.value - (1.0 + 0.2 + 0.0125)).abs() < 1e-15);

        let uncovered = ParameterSet::<f64>::new().with(Family::H, [-1.0]);
        let err = eval_f3(&uncovered, &ArgumentTriple::new(0.1, 0.0, 0.0), &policy()).unwrap_err();
        assert!(matches!(err, Error::DenominatorPole(_)));
    }

    #[test]
    fn cap_without_convergence() {
        let ps = ParameterSet::<f64>::new().with(Family::A, [1.0]);
        let tight = TruncationPolicy::new(1e-16, 5, 2).unwrap();
        let r = eval_f3(&ps, &ArgumentTriple::new(0.3, 0.3, 0.3), &tight).unwrap();
        assert!(!r.converged);
        assert_eq!(r.shells_used, 6);
        assert!(r.strict().is_err());
    }

    #[test]
    fn pfq_examples() {
        let r = eval_pfq::<f64>(&[], &[], &0.3, &policy()).unwrap();
        assert!((r.value - 0.3f64.exp()).abs() < 1e-15);
        let r = eval_pfq(&[q(-2, 1), q(1, 1)], &[q(3, 1)], &q(1, 1), &policy()).unwrap();
        assert_eq!(r.value, q(1, 2));
        assert!(r.terminated_exactly);
        let r = eval_pfq(&[2.0], &[], &0.5, &policy()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-14);
        assert!(eval_pfq(&[1.0], &[-1.0], &0.5, &policy()).is_err());
    }
}
