//! Seeded randomized verification of every formula in the crate.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{
    check_identity, rhs_parameters, CheckReport, FreeScalars, IdentityId, IdentityInstance,
    IdentityPolicy, Lemma,
};
use crate::numerics::{Backend, EvaluationResult, Scalar, TruncationPolicy};
use crate::params::{Family, FamilyIndex, ParameterSet};
use crate::series::{eval_f3, eval_pfq, ArgumentTriple};
use crate::special::{check_special_case, SpecialCase, SpecialCaseId};

/// Values of `r` and `d` drawn by the generators.
pub const SHIFT_CHOICES: [(i64, i64); 3] = [(3, 10), (7, 10), (7, 5)];

/// Largest allowed surplus of numerator over denominator entries along any
/// summation index in generated float parameter sets.
pub const MAX_EXCESS: isize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances_per_identity: usize,
    pub tol: f64,
    pub collapse_tol: f64,
    pub policy: IdentityPolicy,
    pub backend: Backend,
}

/// Shell cap of the triple series in suite checks.
pub const SUITE_SHELL_CAP: usize = 28;

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            instances_per_identity: 25,
            tol: 1e-8,
            collapse_tol: 1e-13,
            policy: IdentityPolicy {
                series: TruncationPolicy::default().with_max_total_degree(SUITE_SHELL_CAP),
                ..IdentityPolicy::default()
            },
            backend: Backend::Float64,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instances_per_identity < 1 {
            return Err(Error::InvalidConfig("instances_per_identity must be at least 1".into()));
        }
        if !(self.tol >= 0.0 && self.collapse_tol >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be non-negative".into()));
        }
        self.policy.series.validate()?;
        if self.policy.outer_max_degree < 1 {
            return Err(Error::InvalidConfig("outer_max_degree must be at least 1".into()));
        }
        Ok(())
    }
}

/// One line of the per-check CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub identity_id: String,
    pub instance_index: usize,
    pub residual: f64,
    pub converged_lhs: bool,
    pub converged_rhs: bool,
    pub pass: bool,
}

impl SuiteRow {
    fn from_report<S: Scalar>(id: String, index: usize, report: &CheckReport<S>) -> Self {
        let (converged_lhs, converged_rhs) = report.converged();
        Self {
            identity_id: id,
            instance_index: index,
            residual: report.residual,
            converged_lhs,
            converged_rhs,
            pass: report.pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Identity,
    Special,
    Lemma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Identity(IdentityId),
    Special(SpecialCaseId),
    Lemma(Lemma),
}

impl Group {
    pub fn all() -> Vec<Group> {
        IdentityId::ALL
            .into_iter()
            .map(Group::Identity)
            .chain(SpecialCaseId::ALL.into_iter().map(Group::Special))
            .chain(Lemma::ALL.into_iter().map(Group::Lemma))
            .collect()
    }

    pub fn name(&self) -> String {
        match self {
            Group::Identity(id) => id.to_string(),
            Group::Special(id) => id.to_string(),
            Group::Lemma(lemma) => lemma.to_string(),
        }
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            Group::Identity(_) => GroupKind::Identity,
            Group::Special(_) => GroupKind::Special,
            Group::Lemma(_) => GroupKind::Lemma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub id: String,
    pub kind: GroupKind,
    pub checks: usize,
    pub passed: usize,
    pub not_converged: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse_passed: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_collapse_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    /// Identity and special-case groups.
    pub identity_groups: usize,
    pub groups: Vec<GroupSummary>,
    pub total_checks: usize,
    pub total_passed: usize,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        writer.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// True when some failing row did not converge, and all failing rows
    /// are explained by that.
    pub fn only_convergence_failures(&self) -> bool {
        let mut failing = self.rows.iter().filter(|r| !r.pass).peekable();
        failing.peek().is_some() && failing.all(|r| !(r.converged_lhs && r.converged_rhs))
    }
}

/// Random source for one check; independent of scheduling.
pub fn instance_rng(seed: u64, group: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((group as u64) << 32) | index as u64);
    rng
}

/// Scalars the generators can draw.
pub trait Draw: Scalar {
    /// A value in `[lo, hi]`.
    fn between(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self;
    /// A parameter value in `[0.3, 2.5]`.
    fn positive(rng: &mut ChaCha8Rng) -> Self {
        Self::between(rng, 0.3, 2.5)
    }
    /// A value in `[-bound, bound]`.
    fn small(rng: &mut ChaCha8Rng, bound: f64) -> Self;
}

impl Draw for f64 {
    fn between(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self {
        rng.gen_range(lo..=hi)
    }

    fn small(rng: &mut ChaCha8Rng, bound: f64) -> Self {
        rng.gen_range(-bound..=bound)
    }
}

impl Draw for BigRational {
    fn between(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self {
        let q: i64 = rng.gen_range(2..=9);
        let p_lo = (lo * q as f64).ceil() as i64;
        let p_hi = (hi * q as f64).floor() as i64;
        Self::from_ratio(rng.gen_range(p_lo..=p_hi.max(p_lo)), q)
    }

    fn small(rng: &mut ChaCha8Rng, bound: f64) -> Self {
        let q: i64 = rng.gen_range(5..=12);
        let p_max = (bound * q as f64).floor() as i64;
        Self::from_ratio(rng.gen_range(-p_max..=p_max), q)
    }
}

fn neg_int<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    S::from_i64(-rng.gen_range(1..=3))
}

fn shift_choice<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    let (p, q) = SHIFT_CHOICES[rng.gen_range(0..SHIFT_CHOICES.len())];
    S::from_ratio(p, q)
}

fn near_pole<S: Scalar>(v: &S) -> bool {
    let f = v.to_f64();
    let r = f.round();
    r <= 0.0 && (f - r).abs() < 0.05
}

/// Surplus of numerator over denominator entries along index `j`.
fn excess<S>(ps: &ParameterSet<S>, j: usize) -> isize {
    Family::touching(j)
        .map(|f| {
            let n = ps.len(f) as isize;
            if f.is_numerator() {
                n
            } else {
                -n
            }
        })
        .sum()
}

fn denominators_safe<S: Scalar>(inst: &IdentityInstance<S>) -> bool {
    rhs_parameters(inst).is_ok_and(|ps| {
        ps.entries()
            .chain(inst.ps.entries())
            .all(|(f, v)| f.is_numerator() || !near_pole(v))
    })
}

fn random_args<S: Draw>(rng: &mut ChaCha8Rng) -> ArgumentTriple<S> {
    ArgumentTriple::new(S::small(rng, 0.05), S::small(rng, 0.05), S::small(rng, 0.05))
}

fn random_scalars<S: Draw>(id: IdentityId, rng: &mut ChaCha8Rng) -> FreeScalars<S> {
    let mut scalars = FreeScalars::zeros_for(id);
    scalars.t = scalars.t.map(|_| S::small(rng, 0.2));
    scalars.r = scalars.r.map(|_| shift_choice(rng));
    scalars.d = scalars.d.map(|_| shift_choice(rng));
    scalars
}

/// The same instance with all free scalars set to zero.
pub fn collapsed<S: Scalar>(inst: &IdentityInstance<S>) -> IdentityInstance<S> {
    IdentityInstance {
        scalars: FreeScalars::zeros_for(inst.id),
        ..inst.clone()
    }
}

/// Largest accepted `F(|x|) / |F(x)|` for float instances.
pub const MAX_CONDITION: f64 = 10.0;

/// `F(|x|) / |F(x)|`, the amplification of rounding errors in a series
/// whose parameters are all positive.
pub fn condition_number(ps: &ParameterSet<f64>, args: &ArgumentTriple<f64>) -> f64 {
    let policy = TruncationPolicy::default();
    let abs_args = ArgumentTriple::new(args.x1.abs(), args.x2.abs(), args.x3.abs());
    match (eval_f3(ps, args, &policy), eval_f3(ps, &abs_args, &policy)) {
        (Ok(v), Ok(w)) => w.value / v.value.abs(),
        _ => f64::INFINITY,
    }
}

fn accept<S: Scalar>(inst: &IdentityInstance<S>) -> bool {
    inst.validate().is_ok() && denominators_safe(inst) && denominators_safe(&collapsed(inst))
}

const MAX_DRAWS: usize = 10_000;

/// A float instance: family lengths at most 2, values in `[0.3, 2.5]`,
/// `|t| <= 0.2`, `|x_j| <= 0.05`, `r, d` from [`SHIFT_CHOICES`].
pub fn random_float_instance(id: IdentityId, rng: &mut ChaCha8Rng) -> IdentityInstance<f64> {
    for _ in 0..MAX_DRAWS {
        let mut ps = ParameterSet::new();
        for family in Family::ALL {
            let len = usize::from(rng.gen_bool(0.5));
            ps = ps.with(family, (0..len).map(|_| f64::positive(rng)).collect::<Vec<_>>());
        }
        let mut i = None;
        if let Some(family) = id.family() {
            let len = if rng.gen_bool(0.3) { 2 } else { 1 };
            ps = ps.with(family, (0..len).map(|_| f64::positive(rng)).collect::<Vec<_>>());
            i = Some(rng.gen_range(1..=len));
        }
        if (0..3).any(|j| excess(&ps, j) > MAX_EXCESS) {
            continue;
        }
        let inst = IdentityInstance {
            id,
            ps,
            i,
            scalars: random_scalars(id, rng),
            args: random_args(rng),
        };
        if accept(&inst) && condition_number(&inst.ps, &inst.args) <= MAX_CONDITION {
            return inst;
        }
    }
    panic!("no admissible float instance for {id}");
}

/// A rational instance in which every series terminates: each summation
/// index is bounded by a negative-integer numerator, and the outer sum
/// stops at a negative-integer weight parameter.
pub fn random_rational_instance(id: IdentityId, rng: &mut ChaCha8Rng) -> IdentityInstance<BigRational> {
    let integer_entry = matches!(
        id,
        IdentityId::T1a | IdentityId::T1b | IdentityId::T1c | IdentityId::T9c | IdentityId::T10c
    );
    for _ in 0..MAX_DRAWS {
        let mut ps = ParameterSet::new();
        for family in Family::ALL {
            let len = usize::from(rng.gen_bool(0.4));
            ps = ps.with(family, (0..len).map(|_| BigRational::positive(rng)).collect::<Vec<_>>());
        }
        let entry = if integer_entry {
            neg_int(rng)
        } else {
            BigRational::positive(rng)
        };
        ps = ps
            .with(Family::C, [BigRational::positive(rng), neg_int(rng)])
            .with(Family::Cp, [neg_int(rng)])
            .with(Family::Cpp, [neg_int(rng)]);
        let i = id.family().map(|family| {
            if family == Family::C {
                ps = ps.set_entry(FamilyIndex::new(family, 1), entry.clone()).expect("c has two entries");
            } else {
                ps = ps.clone().with(family, [entry.clone()]);
            }
            1
        });
        let inst = IdentityInstance {
            id,
            ps,
            i,
            scalars: random_scalars(id, rng),
            args: random_args(rng),
        };
        if accept(&inst) {
            return inst;
        }
    }
    panic!("no admissible rational instance for {id}");
}

pub fn random_special_case<S: Draw>(id: SpecialCaseId, terminating: bool, rng: &mut ChaCha8Rng) -> SpecialCase<S> {
    let numerator = |rng: &mut ChaCha8Rng| {
        if terminating {
            neg_int(rng)
        } else {
            S::positive(rng)
        }
    };
    match id {
        SpecialCaseId::FA3 => SpecialCase::FA3 {
            a: numerator(rng),
            b: [S::positive(rng), S::positive(rng), S::positive(rng)],
            c: [S::positive(rng), S::positive(rng), S::positive(rng)],
        },
        SpecialCaseId::FD3 => SpecialCase::FD3 {
            a: numerator(rng),
            b: [S::positive(rng), S::positive(rng), S::positive(rng)],
            c: S::positive(rng),
        },
        SpecialCaseId::HA => {
            // Surplus numerators along every index: keep them below the denominators.
            let small = |rng: &mut ChaCha8Rng| {
                if terminating {
                    neg_int(rng)
                } else {
                    S::between(rng, 0.3, 1.0)
                }
            };
            SpecialCase::HA {
                a: small(rng),
                b1: small(rng),
                b2: small(rng),
                c1: S::between(rng, 1.0, 2.5),
                c2: S::between(rng, 1.0, 2.5),
            }
        }
    }
}

/// Random `n <= 15` and parameters for `lemma`; no denominator parameter of
/// the series is a non-positive integer and the closed form is finite.
pub fn random_lemma_instance(lemma: Lemma, rng: &mut ChaCha8Rng) -> (usize, Vec<BigRational>) {
    let policy = lemma_policy();
    for _ in 0..MAX_DRAWS {
        let n = rng.gen_range(0..=15);
        let params: Vec<BigRational> = (0..lemma.arity())
            .map(|_| {
                let q: i64 = rng.gen_range(2..=9);
                if lemma == Lemma::Binomial {
                    BigRational::from_ratio(rng.gen_range(-q + 1..q), q)
                } else {
                    BigRational::from_ratio(rng.gen_range(-3 * q..=3 * q), q)
                }
            })
            .collect();
        let ok = lemma.closed_form(n, &params).is_ok()
            && lemma.series(n, &params).is_ok_and(|(num, den, z)| {
                den.iter().all(|b| b.nonpositive_integer().is_none()) && eval_pfq(&num, &den, &z, &policy).is_ok()
            });
        if ok {
            return (n, params);
        }
    }
    panic!("no admissible parameters for {lemma}");
}

fn lemma_policy() -> TruncationPolicy {
    TruncationPolicy::new(1e-15, 40, 2).expect("valid policy")
}

/// Compares a lemma's terminating series with its closed form; passes
/// only on exact equality.
pub fn check_lemma(lemma: Lemma, n: usize, params: &[BigRational]) -> CheckReport<BigRational> {
    let series = lemma
        .series(n, params)
        .and_then(|(num, den, z)| eval_pfq(&num, &den, &z, &lemma_policy()));
    let closed = lemma.closed_form(n, params).map(|v| EvaluationResult::exact(v, n + 1));
    CheckReport::from_sides(lemma.to_string(), series, closed, 0.0)
}

fn identity_rows<S: Scalar>(
    inst: &IdentityInstance<S>,
    index: usize,
    config: &SuiteConfig,
) -> Vec<SuiteRow> {
    let id = inst.id.to_string();
    let main = check_identity(inst, &config.policy, config.tol);
    let collapse = check_identity(&collapsed(inst), &config.policy, config.collapse_tol);
    vec![
        SuiteRow::from_report(id.clone(), index, &main),
        SuiteRow::from_report(format!("{id}-collapse"), index, &collapse),
    ]
}

fn run_task(group_index: usize, group: Group, index: usize, config: &SuiteConfig) -> Vec<SuiteRow> {
    let mut rng = instance_rng(config.seed, group_index, index);
    let rational = config.backend == Backend::Rational;
    match group {
        Group::Identity(id) => {
            if rational {
                identity_rows(&random_rational_instance(id, &mut rng), index, config)
            } else {
                identity_rows(&random_float_instance(id, &mut rng), index, config)
            }
        }
        Group::Special(id) => {
            let row = if rational {
                let case = random_special_case::<BigRational>(id, true, &mut rng);
                let t = BigRational::small(&mut rng, 0.2);
                let report = check_special_case(&case, t, random_args(&mut rng), &config.policy, config.tol);
                SuiteRow::from_report(id.to_string(), index, &report)
            } else {
                let case = random_special_case::<f64>(id, false, &mut rng);
                let t = f64::small(&mut rng, 0.2);
                let report = check_special_case(&case, t, random_args(&mut rng), &config.policy, config.tol);
                SuiteRow::from_report(id.to_string(), index, &report)
            };
            vec![row]
        }
        Group::Lemma(lemma) => {
            let (n, params) = random_lemma_instance(lemma, &mut rng);
            vec![SuiteRow::from_report(lemma.to_string(), index, &check_lemma(lemma, n, &params))]
        }
    }
}

fn summarize(group: Group, rows: &[SuiteRow]) -> GroupSummary {
    let (collapse, main): (Vec<&SuiteRow>, Vec<&SuiteRow>) =
        rows.iter().partition(|r| r.identity_id.ends_with("-collapse"));
    let max = |rows: &[&SuiteRow]| rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let is_identity = group.kind() == GroupKind::Identity;
    GroupSummary {
        id: group.name(),
        kind: group.kind(),
        checks: main.len(),
        passed: main.iter().filter(|r| r.pass).count(),
        not_converged: main.iter().filter(|r| !(r.converged_lhs && r.converged_rhs)).count(),
        max_residual: max(&main),
        collapse_passed: is_identity.then(|| collapse.iter().filter(|r| r.pass).count()),
        max_collapse_residual: is_identity.then(|| max(&collapse)),
    }
}

/// Runs every group with `config.instances_per_identity` seeded instances.
/// Checks run in parallel; rows come back in group, then instance, order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let groups = Group::all();
    let tasks: Vec<(usize, Group, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, &group)| (0..config.instances_per_identity).map(move |i| (g, group, i)))
        .collect();
    let per_task: Vec<Vec<SuiteRow>> = tasks
        .par_iter()
        .map(|&(g, group, i)| run_task(g, group, i, config))
        .collect();

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let start = g * config.instances_per_identity;
        let group_rows: Vec<SuiteRow> = per_task[start..start + config.instances_per_identity]
            .iter()
            .flatten()
            .cloned()
            .collect();
        summaries.push(summarize(*group, &group_rows));
        rows.extend(group_rows);
    }
    let total_checks = rows.len();
    let total_passed = rows.iter().filter(|r| r.pass).count();
    Ok(SuiteReport {
        summary: SuiteSummary {
            config: *config,
            identity_groups: groups.iter().filter(|g| g.kind() != GroupKind::Lemma).count(),
            groups: summaries,
            total_checks,
            total_passed,
            all_pass: total_passed == total_checks,
        },
        rows,
    })
}
