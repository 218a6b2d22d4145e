//! Generic evaluation of both sides of a registered summation formula.

use serde::Serialize;

use super::lemmas::binomial_1f0;
use super::registry::{ArgMap, Edit, Extra, FreeScalar, Guard, IdentityId, IdentitySpec, OuterBase, Prefactor, Selection, ShiftRule};
use crate::error::{Error, Result};
use crate::numerics::{pochhammer, power, EvaluationResult, Number, Scalar, StallMonitor, TruncationPolicy};
use crate::params::{Family, FamilyIndex, ParameterSet};
use crate::series::{eval_f3, eval_f3_graded, ArgumentTriple};

/// The scalars `t`, `r`, `d` a formula may depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeScalars<S> {
    pub t: Option<S>,
    pub r: Option<S>,
    pub d: Option<S>,
}

impl<S> Default for FreeScalars<S> {
    fn default() -> Self {
        Self {
            t: None,
            r: None,
            d: None,
        }
    }
}

impl<S: Scalar> FreeScalars<S> {
    pub fn t(t: S) -> Self {
        Self {
            t: Some(t),
            ..Self::default()
        }
    }

    pub fn r(r: S) -> Self {
        Self {
            r: Some(r),
            ..Self::default()
        }
    }

    pub fn d(d: S) -> Self {
        Self {
            d: Some(d),
            ..Self::default()
        }
    }

    pub fn get(&self, which: FreeScalar) -> Option<&S> {
        match which {
            FreeScalar::T => self.t.as_ref(),
            FreeScalar::R => self.r.as_ref(),
            FreeScalar::D => self.d.as_ref(),
        }
    }

    /// All required scalars set to zero.
    pub fn zeros_for(id: IdentityId) -> Self {
        let mut out = Self::default();
        for s in id.scalars() {
            match s {
                FreeScalar::T => out.t = Some(S::zero()),
                FreeScalar::R => out.r = Some(S::zero()),
                FreeScalar::D => out.d = Some(S::zero()),
            }
        }
        out
    }
}

/// One concrete instance of a summation formula.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityInstance<S> {
    pub id: IdentityId,
    pub ps: ParameterSet<S>,
    /// The `i` of "where i = 1, ..., A" (1-based); `None` for formulas
    /// without a distinguished entry.
    pub i: Option<usize>,
    pub scalars: FreeScalars<S>,
    pub args: ArgumentTriple<S>,
}

/// Truncation for the inner triple series and cap for the outer `k` sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityPolicy {
    pub series: TruncationPolicy,
    pub outer_max_degree: usize,
}

impl Default for IdentityPolicy {
    fn default() -> Self {
        Self {
            series: TruncationPolicy::default(),
            outer_max_degree: 40,
        }
    }
}

impl From<TruncationPolicy> for IdentityPolicy {
    fn from(series: TruncationPolicy) -> Self {
        Self {
            series,
            ..Self::default()
        }
    }
}

impl IdentityPolicy {
    fn outer(&self) -> TruncationPolicy {
        self.series.with_max_total_degree(self.outer_max_degree)
    }
}

/// Outcome of checking one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport<S> {
    pub id: String,
    pub lhs: Option<S>,
    pub rhs: Option<S>,
    /// `|lhs - rhs| / max(|rhs|, 1e-300)`; infinite when a side is missing.
    pub residual: f64,
    pub pass: bool,
    pub lhs_diag: Option<EvaluationResult<S>>,
    pub rhs_diag: Option<EvaluationResult<S>>,
    /// Why the check could not be completed.
    pub failure: Option<String>,
}

impl<S: Scalar> CheckReport<S> {
    pub fn converged(&self) -> (bool, bool) {
        (
            self.lhs_diag.as_ref().is_some_and(|d| d.converged),
            self.rhs_diag.as_ref().is_some_and(|d| d.converged),
        )
    }

    pub(crate) fn from_sides(
        id: String,
        lhs: Result<EvaluationResult<S>>,
        rhs: Result<EvaluationResult<S>>,
        tol: f64,
    ) -> Self {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                let residual = relative_residual(&l.value, &r.value);
                let pass = residual <= tol && l.converged && r.converged;
                CheckReport {
                    id,
                    lhs: Some(l.value.clone()),
                    rhs: Some(r.value.clone()),
                    residual,
                    pass,
                    lhs_diag: Some(l),
                    rhs_diag: Some(r),
                    failure: None,
                }
            }
            (l, r) => {
                let failure = [l.as_ref().err(), r.as_ref().err()]
                    .into_iter()
                    .flatten()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                Self::failed(id, failure, l.ok(), r.ok())
            }
        }
    }

    pub(crate) fn failed(
        id: String,
        failure: String,
        lhs: Option<EvaluationResult<S>>,
        rhs: Option<EvaluationResult<S>>,
    ) -> Self {
        CheckReport {
            id,
            lhs: lhs.as_ref().map(|d| d.value.clone()),
            rhs: rhs.as_ref().map(|d| d.value.clone()),
            residual: f64::INFINITY,
            pass: false,
            lhs_diag: lhs,
            rhs_diag: rhs,
            failure: Some(failure),
        }
    }

    pub fn to_number(&self) -> CheckReport<Number> {
        CheckReport {
            id: self.id.clone(),
            lhs: self.lhs.as_ref().map(Scalar::to_number),
            rhs: self.rhs.as_ref().map(Scalar::to_number),
            residual: self.residual,
            pass: self.pass,
            lhs_diag: self.lhs_diag.as_ref().map(EvaluationResult::to_number),
            rhs_diag: self.rhs_diag.as_ref().map(EvaluationResult::to_number),
            failure: self.failure.clone(),
        }
    }
}

/// `|a - b| / max(|b|, 1e-300)`.
pub fn relative_residual<S: Scalar>(a: &S, b: &S) -> f64 {
    (a.clone() - b).magnitude() / b.magnitude().max(1e-300)
}

impl<S: Scalar> IdentityInstance<S> {
    pub fn spec(&self) -> &'static IdentitySpec {
        self.id.spec()
    }

    fn entry_index(&self) -> Option<FamilyIndex> {
        Some(FamilyIndex::new(self.spec().family?, self.i?))
    }

    /// Checks the instance against its formula's requirements.
    pub fn validate(&self) -> Result<()> {
        let spec = self.spec();
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        match (spec.family, self.i) {
            (Some(family), Some(i)) => {
                self.ps.get(FamilyIndex::new(family, i)).map_err(|e| {
                    Error::InvalidInstance(format!("{}: {e}", self.id))
                })?;
            }
            (Some(family), None) => {
                return invalid(format!("{} needs an index i into family {family}", self.id));
            }
            (None, Some(_)) => {
                return invalid(format!("{} takes no family index", self.id));
            }
            (None, None) => {}
        }
        for which in [FreeScalar::T, FreeScalar::R, FreeScalar::D] {
            let required = spec.scalars.contains(&which);
            match (required, self.scalars.get(which).is_some()) {
                (true, false) => return invalid(format!("{} requires scalar {}", self.id, which.name())),
                (false, true) => return invalid(format!("{} does not use scalar {}", self.id, which.name())),
                _ => {}
            }
        }
        let ctx = self.context();
        for extra in spec.extras {
            if let Extra::Rising {
                param,
                denominator: true,
            } = extra
            {
                let value = param.eval(&ctx.v, &ctx.r, &ctx.d);
                if value.nonpositive_integer().is_some() {
                    return invalid(format!(
                        "{}: denominator parameter {value} of the outer weight is a non-positive integer",
                        self.id
                    ));
                }
            }
        }
        Ok(())
    }

    fn context(&self) -> Context<S> {
        let v = self
            .entry_index()
            .and_then(|idx| self.ps.get(idx).ok().cloned())
            .unwrap_or_else(S::zero);
        let or_zero = |x: &Option<S>| x.clone().unwrap_or_else(S::zero);
        Context {
            v,
            t: or_zero(&self.scalars.t),
            r: or_zero(&self.scalars.r),
            d: or_zero(&self.scalars.d),
        }
    }

    /// Positions `(family, 0-based index)` picked out by `selection`.
    fn selected(&self, selection: Selection) -> Vec<(Family, usize)> {
        let entry = self.entry_index();
        let along = |j: usize, skip: Option<FamilyIndex>| -> Vec<(Family, usize)> {
            Family::touching(j)
                .flat_map(|f| (0..self.ps.len(f)).map(move |p| (f, p)))
                .filter(|&(f, p)| skip.is_none_or(|e| !(e.family == f && e.i == p + 1)))
                .collect()
        };
        match selection {
            Selection::Entry => entry.map(|e| vec![(e.family, e.i - 1)]).unwrap_or_default(),
            Selection::Along(j) => along(j, None),
            Selection::AlongExceptEntry(j) => along(j, entry),
        }
    }

    fn guard_holds(&self, ctx: &Context<S>) -> bool {
        match self.spec().guard {
            Guard::None => true,
            Guard::TBelowOne => ctx.t.magnitude() < 1.0,
            Guard::ShiftedRatioBelowOne => {
                let denom = self.args.x1.clone() - S::one();
                !denom.is_zero() && ((ctx.t.clone() + &self.args.x1) / denom).magnitude() < 1.0
            }
        }
    }
}

struct Context<S> {
    v: S,
    t: S,
    r: S,
    d: S,
}

/// Outer-sum machinery for one instance.
struct Outer<'a, S> {
    inst: &'a IdentityInstance<S>,
    ctx: Context<S>,
    weight_entries: Vec<(Family, usize)>,
    shift_entries: Vec<(Family, usize)>,
    base: S,
    /// `(u, y)` when the first argument is `y / u`.
    graded: Option<(S, S)>,
}

impl<'a, S: Scalar> Outer<'a, S> {
    fn new(inst: &'a IdentityInstance<S>) -> Result<Self> {
        let spec = inst.spec();
        let ctx = inst.context();
        // For the scaled first argument `x1' = y / u` the outer base is `beta * u`;
        // the factor `u^k x1'^m1 = u^(k - m1) y^m1` is then formed without dividing by `u`.
        let graded = match spec.lhs_args {
            ArgMap::ScaleFirstByOnePlusTOverT => Some((ctx.t.clone(), -S::one())),
            ArgMap::ScaleFirstByOnePlusTOverTPlusX1 => {
                let denom = inst.args.x1.clone() - S::one();
                if denom.is_zero() {
                    return Err(Error::DenominatorPole("x1 - 1 = 0 in the outer base".into()));
                }
                Some((ctx.t.clone() + &inst.args.x1, S::one() / denom))
            }
            _ => None,
        };
        let base = match spec.base {
            OuterBase::T => ctx.t.clone(),
            OuterBase::NegT => -ctx.t.clone(),
            OuterBase::X1 => inst.args.x1.clone(),
            OuterBase::NegX1 => -inst.args.x1.clone(),
            OuterBase::ShiftedRatio => {
                let denom = inst.args.x1.clone() - S::one();
                if denom.is_zero() {
                    return Err(Error::DenominatorPole("x1 - 1 = 0 in the outer base".into()));
                }
                (ctx.t.clone() + &inst.args.x1) / denom
            }
        };
        let shift_entries = match spec.shift {
            ShiftRule::Shift(sel) => inst.selected(sel),
            ShiftRule::EntryToNegK => Vec::new(),
        };
        let (base, graded) = match graded {
            Some((u, beta)) => {
                let y = (S::one() + &ctx.t) * &inst.args.x1;
                (beta, Some((u, y)))
            }
            None => (base, None),
        };
        Ok(Self {
            graded,
            weight_entries: inst.selected(spec.weight),
            shift_entries,
            inst,
            ctx,
            base,
        })
    }

    fn extra_param(&self, param: &super::registry::Affine) -> S {
        param.eval(&self.ctx.v, &self.ctx.r, &self.ctx.d)
    }

    /// Largest `k` with a possibly nonzero weight, if the outer sum terminates.
    fn termination(&self) -> Option<u64> {
        if self.base.is_zero() {
            return Some(0);
        }
        let from_entries = self
            .weight_entries
            .iter()
            .filter(|(f, _)| f.is_numerator())
            .filter_map(|&(f, p)| self.inst.ps.family(f)[p].nonpositive_integer());
        let from_extras = self.inst.spec().extras.iter().filter_map(|extra| match extra {
            Extra::Rising {
                param,
                denominator: false,
            } => self.extra_param(param).nonpositive_integer(),
            Extra::NearlyPoised { param } => (self.extra_param(param) + S::one())
                .nonpositive_integer()
                .map(|n| n + 1),
            _ => None,
        });
        from_entries.chain(from_extras).min()
    }

    fn weight(&self, k: usize) -> Result<S> {
        let mut w = S::one();
        for &(f, p) in &self.weight_entries {
            let value = &self.inst.ps.family(f)[p];
            let symbol = pochhammer(value, k);
            if f.is_numerator() {
                w = w * symbol;
            } else if symbol.is_zero() {
                return Err(Error::DenominatorPole(format!("({value})_{k} from family {f} in the outer weight")));
            } else {
                w = w / symbol;
            }
        }
        for extra in self.inst.spec().extras {
            match extra {
                Extra::Rising { param, denominator } => {
                    let value = self.extra_param(param);
                    let symbol = pochhammer(&value, k);
                    if !denominator {
                        w = w * symbol;
                    } else if symbol.is_zero() {
                        return Err(Error::DenominatorPole(format!("({value})_{k} in the outer weight")));
                    } else {
                        w = w / symbol;
                    }
                }
                Extra::NearlyPoised { param } => {
                    if k > 0 {
                        let p = self.extra_param(param);
                        let tail = p.clone() + S::from_i64(2 * k as i64);
                        w = w * pochhammer(&(p + S::one()), k - 1) * tail;
                    }
                }
            }
        }
        Ok(w * self.base.powi(k as i64) / pochhammer(&S::one(), k))
    }

    fn shifted(&self, k: usize) -> Result<ParameterSet<S>> {
        let ps = &self.inst.ps;
        match self.inst.spec().shift {
            ShiftRule::Shift(_) => {
                let mut out = ps.clone();
                for &(f, p) in &self.shift_entries {
                    out = out.shift_entry(FamilyIndex::new(f, p + 1), k as i64)?;
                }
                Ok(out)
            }
            ShiftRule::EntryToNegK => {
                let idx = self.inst.entry_index().expect("validated instance");
                ps.set_entry(idx, -S::from_i64(k as i64))
            }
        }
    }
}

fn map_args<S: Scalar>(map: ArgMap, args: &ArgumentTriple<S>, t: &S) -> Result<ArgumentTriple<S>> {
    let mut out = args.clone();
    match map {
        ArgMap::Identity => {}
        ArgMap::DivideByOneMinusT(flags) => {
            let denom = S::one() - t;
            if denom.is_zero() {
                return Err(Error::PoleAtOne);
            }
            for (j, x) in [&mut out.x1, &mut out.x2, &mut out.x3].into_iter().enumerate() {
                if flags[j] {
                    *x = x.clone() / &denom;
                }
            }
        }
        ArgMap::AddT(j) => {
            let x = [&mut out.x1, &mut out.x2, &mut out.x3].into_iter().nth(j).expect("argument index");
            *x = x.clone() + t;
        }
        ArgMap::ScaleFirstByOnePlusTOverT | ArgMap::ScaleFirstByOnePlusTOverTPlusX1 => {
            let denom = if map == ArgMap::ScaleFirstByOnePlusTOverT {
                t.clone()
            } else {
                t.clone() + &args.x1
            };
            if denom.is_zero() {
                return Err(Error::DenominatorPole("singular argument scaling".into()));
            }
            out.x1 = (S::one() + t) * &args.x1 / denom;
        }
    }
    Ok(out)
}

/// Left-hand side: the outer sum over `k` of weight times shifted series.
pub fn lhs_value<S: Scalar>(inst: &IdentityInstance<S>, policy: &IdentityPolicy) -> Result<EvaluationResult<S>> {
    inst.validate()?;
    let outer = Outer::new(inst)?;
    let spec = inst.spec();
    let cap = policy.outer_max_degree;
    let bound = outer.termination();
    let exhaustive = bound.is_some_and(|b| b <= cap as u64);
    let last = match bound {
        Some(b) if exhaustive => b as usize,
        _ => cap,
    };

    let outer_policy = policy.outer();
    let mut monitor = StallMonitor::new(&outer_policy);
    let mut sum = S::zero();
    let mut inner_converged = true;
    let mut inner_exact = true;
    let mut stalled = false;
    let mut used = 0;
    let mut last_magnitude = 0.0;
    for k in 0..=last {
        used = k + 1;
        let w = outer.weight(k)?;
        let term = if w.is_zero() {
            S::zero()
        } else {
            let ps_k = outer.shifted(k)?;
            let inner = match &outer.graded {
                Some((u, y)) => {
                    let args_k = ArgumentTriple::new(y.clone(), inst.args.x2.clone(), inst.args.x3.clone());
                    let grades: Vec<S> = (0..=k).rev().map(|e| u.powi(e as i64)).collect();
                    eval_f3_graded(&ps_k, &args_k, Some(&grades), &policy.series)?
                }
                None => {
                    let args_k = map_args(spec.lhs_args, &inst.args, &outer.ctx.t)?;
                    eval_f3(&ps_k, &args_k, &policy.series)?
                }
            };
            let truncated = w.magnitude() * inner.last_shell_magnitude;
            inner_converged &=
                inner.converged || truncated <= policy.series.tol * (sum.magnitude() + (w.clone() * &inner.value).magnitude()).max(1.0);
            inner_exact &= inner.terminated_exactly;
            w * inner.value
        };
        last_magnitude = term.magnitude();
        sum = sum + term;
        if exhaustive {
            continue;
        }
        let partial = sum.magnitude();
        if !partial.is_finite() {
            break;
        }
        if monitor.observe(last_magnitude, partial) {
            stalled = true;
            break;
        }
    }
    let converged = (exhaustive || stalled) && inner_converged && inst.guard_holds(&outer.ctx);
    Ok(EvaluationResult {
        value: sum,
        shells_used: used,
        last_shell_magnitude: last_magnitude,
        converged,
        terminated_exactly: converged && exhaustive && inner_exact,
    })
}

/// Parameters of the series on the right-hand side.
pub fn rhs_parameters<S: Scalar>(inst: &IdentityInstance<S>) -> Result<ParameterSet<S>> {
    inst.validate()?;
    let ctx = inst.context();
    let mut ps = inst.ps.clone();
    for edit in inst.spec().rhs_edits {
        match edit {
            Edit::Replace(expr) => {
                let idx = inst.entry_index().expect("validated instance");
                ps = ps.set_entry(idx, expr.eval(&ctx.v, &ctx.r, &ctx.d))?;
            }
            Edit::Push(family, expr) => {
                ps = ps.push_entry(*family, expr.eval(&ctx.v, &ctx.r, &ctx.d));
            }
        }
    }
    Ok(ps)
}

/// Right-hand side: prefactor times the series on the edited parameters.
pub fn rhs_value<S: Scalar>(inst: &IdentityInstance<S>, policy: &IdentityPolicy) -> Result<EvaluationResult<S>> {
    let ps = rhs_parameters(inst)?;
    let spec = inst.spec();
    let ctx = inst.context();
    let args = map_args(spec.rhs_args, &inst.args, &ctx.t)?;
    let prefactor = match spec.prefactor {
        Prefactor::One => S::one(),
        Prefactor::OneMinusTPowNegEntry => binomial_1f0(&ctx.v, &ctx.t)?,
        Prefactor::OnePlusTPowNegEntry => binomial_1f0(&ctx.v, &-ctx.t.clone())?,
        Prefactor::RatioPowEntry => {
            let denom = S::one() + &ctx.t;
            if denom.is_zero() {
                return Err(Error::DenominatorPole("1 + t = 0 in the prefactor".into()));
            }
            power(&((S::one() - &inst.args.x1) / denom), &ctx.v)?
        }
    };
    let mut result = eval_f3(&ps, &args, &policy.series)?;
    result.value = prefactor * result.value;
    Ok(result)
}

/// Evaluates both sides and compares them at relative tolerance `tol`.
pub fn check_identity<S: Scalar>(inst: &IdentityInstance<S>, policy: &IdentityPolicy, tol: f64) -> CheckReport<S> {
    let id = inst.id.to_string();
    if let Err(e) = inst.validate() {
        return CheckReport::failed(id, e.to_string(), None, None);
    }
    CheckReport::from_sides(id, lhs_value(inst, policy), rhs_value(inst, policy), tol)
}
