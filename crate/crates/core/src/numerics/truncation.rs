use serde::{Deserialize, Serialize};

use super::{Number, Scalar};
use crate::error::{Error, Result};

/// Stopping rule for every truncated infinite sum in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Relative size below which a term (or shell) counts as negligible.
    pub tol: f64,
    /// Largest index summed: the total degree `m1+m2+m3` for triple series,
    /// the outer index `k` for one-dimensional sums.
    pub max_total_degree: usize,
    /// Number of consecutive negligible terms required before stopping.
    pub stall_window: usize,
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_total_degree: usize, stall_window: usize) -> Result<Self> {
        let policy = Self {
            tol,
            max_total_degree,
            stall_window,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidPolicy(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_total_degree < 1 {
            return Err(Error::InvalidPolicy("max_total_degree must be at least 1".into()));
        }
        if self.stall_window < 1 {
            return Err(Error::InvalidPolicy("stall_window must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_max_total_degree(self, max_total_degree: usize) -> Self {
        Self {
            max_total_degree,
            ..self
        }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-15,
            max_total_degree: 40,
            stall_window: 2,
        }
    }
}

/// Value of a truncated series together with how the truncation went.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult<S> {
    pub value: S,
    /// Number of shells (or terms) that were summed.
    pub shells_used: usize,
    /// Magnitude of the last shell that was summed.
    pub last_shell_magnitude: f64,
    pub converged: bool,
    /// Every nonzero term was summed; implies `converged`.
    pub terminated_exactly: bool,
}

impl<S: Scalar> EvaluationResult<S> {
    pub fn exact(value: S, shells_used: usize) -> Self {
        Self {
            value,
            shells_used,
            last_shell_magnitude: 0.0,
            converged: true,
            terminated_exactly: true,
        }
    }

    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn strict(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                terms: self.shells_used,
                last_magnitude: self.last_shell_magnitude,
            })
        }
    }

    pub fn to_number(&self) -> EvaluationResult<Number> {
        EvaluationResult {
            value: self.value.to_number(),
            shells_used: self.shells_used,
            last_shell_magnitude: self.last_shell_magnitude,
            converged: self.converged,
            terminated_exactly: self.terminated_exactly,
        }
    }
}

/// Tracks consecutive negligible contributions against the running sum.
#[derive(Debug, Clone)]
pub struct StallMonitor {
    tol: f64,
    window: usize,
    run: usize,
}

impl StallMonitor {
    pub fn new(policy: &TruncationPolicy) -> Self {
        Self {
            tol: policy.tol,
            window: policy.stall_window,
            run: 0,
        }
    }

    /// Records one contribution of size `magnitude` after which the partial
    /// sum has size `partial`. Returns `true` once the window is full.
    pub fn observe(&mut self, magnitude: f64, partial: f64) -> bool {
        if magnitude < self.tol * partial.max(1.0) {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= self.window
    }
}

/// Sums `term(0) + term(1) + ...` in increasing order until the stall rule of
/// `policy` fires or `policy.max_total_degree` is reached.
///
/// Hitting the cap is not an error here: the partial sum comes back with
/// `converged == false`. Use [`EvaluationResult::strict`] to reject it.
pub fn adaptive_sum<S: Scalar>(
    mut term: impl FnMut(usize) -> S,
    policy: &TruncationPolicy,
) -> EvaluationResult<S> {
    match try_adaptive_sum(|k| Ok(term(k)), policy) {
        Ok(result) => result,
        Err(_) => unreachable!("infallible term"),
    }
}

/// Fallible variant of [`adaptive_sum`]; the first term error aborts the sum.
pub fn try_adaptive_sum<S: Scalar>(
    mut term: impl FnMut(usize) -> Result<S>,
    policy: &TruncationPolicy,
) -> Result<EvaluationResult<S>> {
    let mut monitor = StallMonitor::new(policy);
    let mut sum = S::zero();
    let mut last = 0.0;
    for k in 0..=policy.max_total_degree {
        let t = term(k)?;
        last = t.magnitude();
        sum = sum + t;
        let partial = sum.magnitude();
        if !partial.is_finite() {
            return Ok(not_converged(sum, k + 1, last));
        }
        if monitor.observe(last, partial) {
            return Ok(EvaluationResult {
                value: sum,
                shells_used: k + 1,
                last_shell_magnitude: last,
                converged: true,
                terminated_exactly: false,
            });
        }
    }
    Ok(not_converged(sum, policy.max_total_degree + 1, last))
}

fn not_converged<S>(value: S, shells_used: usize, last: f64) -> EvaluationResult<S> {
    EvaluationResult {
        value,
        shells_used,
        last_shell_magnitude: last,
        converged: false,
        terminated_exactly: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy(tol: f64, cap: usize) -> TruncationPolicy {
        TruncationPolicy::new(tol, cap, 2).unwrap()
    }

    #[test]
    fn zero_terms_converge_immediately() {
        let r = adaptive_sum(|_| 0.0, &policy(1e-12, 50));
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
        assert_eq!(r.shells_used, 2);
    }

    #[test]
    fn geometric_series() {
        let r = adaptive_sum(|k| 0.5f64.powi(k as i32), &policy(1e-12, 200));
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cap_reached_is_flagged() {
        let r = adaptive_sum(|_| 1.0, &policy(1e-12, 10));
        assert!(!r.converged);
        assert_eq!(r.value, 11.0);
        assert!(matches!(r.strict(), Err(Error::NotConverged { terms: 11, .. })));
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 10, 1).is_err());
        assert!(TruncationPolicy::new(1e-10, 0, 1).is_err());
        assert!(TruncationPolicy::new(1e-10, 10, 0).is_err());
        assert!(TruncationPolicy::default().validate().is_ok());
    }

    #[test]
    fn term_errors_propagate() {
        let r: Result<EvaluationResult<f64>> = try_adaptive_sum(
            |k| if k == 3 { Err(Error::PoleAtOne) } else { Ok(1.0) },
            &policy(1e-12, 10),
        );
        assert_eq!(r.unwrap_err(), Error::PoleAtOne);
    }
}
