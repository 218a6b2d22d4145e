//! Classical three-variable functions placed inside `F^(3)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::{check_identity, CheckReport, FreeScalars, IdentityId, IdentityInstance, IdentityPolicy};
use crate::numerics::Scalar;
use crate::params::{Family, ParameterSet};
use crate::series::ArgumentTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialCaseId {
    FA3,
    FD3,
    HA,
}

impl SpecialCaseId {
    pub const ALL: [SpecialCaseId; 3] = [SpecialCaseId::FA3, SpecialCaseId::FD3, SpecialCaseId::HA];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecialCaseId::FA3 => "FA3",
            SpecialCaseId::FD3 => "FD3",
            SpecialCaseId::HA => "HA",
        }
    }

    /// The identity whose specialization gives this function's formula.
    pub fn identity(self) -> IdentityId {
        match self {
            SpecialCaseId::FA3 | SpecialCaseId::FD3 => IdentityId::T1a,
            SpecialCaseId::HA => IdentityId::T2x1,
        }
    }
}

impl fmt::Display for SpecialCaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpecialCaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown special case `{s}`")))
    }
}

/// Lauricella `F_A`: `a=[a]`, `c,c',c''=[b_j]`, `h,h',h''=[c_j]`.
pub fn lauricella_fa3<S: Scalar>(a: S, b1: S, b2: S, b3: S, c1: S, c2: S, c3: S) -> ParameterSet<S> {
    ParameterSet::new()
        .with(Family::A, [a])
        .with(Family::C, [b1])
        .with(Family::Cp, [b2])
        .with(Family::Cpp, [b3])
        .with(Family::H, [c1])
        .with(Family::Hp, [c2])
        .with(Family::Hpp, [c3])
}

/// Lauricella `F_D`: `a=[a]`, `c,c',c''=[b_j]`, `e=[c]`.
pub fn lauricella_fd3<S: Scalar>(a: S, b1: S, b2: S, b3: S, c: S) -> ParameterSet<S> {
    ParameterSet::new()
        .with(Family::A, [a])
        .with(Family::C, [b1])
        .with(Family::Cp, [b2])
        .with(Family::Cpp, [b3])
        .with(Family::E, [c])
}

/// Srivastava `H_A`: `b''=[a]`, `b=[b1]`, `b'=[b2]`, `h=[c1]`, `g'=[c2]`.
pub fn srivastava_ha<S: Scalar>(a: S, b1: S, b2: S, c1: S, c2: S) -> ParameterSet<S> {
    ParameterSet::new()
        .with(Family::Bpp, [a])
        .with(Family::B, [b1])
        .with(Family::Bp, [b2])
        .with(Family::H, [c1])
        .with(Family::Gp, [c2])
}

/// Parameters of one of the special functions.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecialCase<S> {
    FA3 { a: S, b: [S; 3], c: [S; 3] },
    FD3 { a: S, b: [S; 3], c: S },
    HA { a: S, b1: S, b2: S, c1: S, c2: S },
}

impl<S: Scalar> SpecialCase<S> {
    pub fn id(&self) -> SpecialCaseId {
        match self {
            SpecialCase::FA3 { .. } => SpecialCaseId::FA3,
            SpecialCase::FD3 { .. } => SpecialCaseId::FD3,
            SpecialCase::HA { .. } => SpecialCaseId::HA,
        }
    }

    pub fn parameter_set(&self) -> ParameterSet<S> {
        match self.clone() {
            SpecialCase::FA3 {
                a,
                b: [b1, b2, b3],
                c: [c1, c2, c3],
            } => lauricella_fa3(a, b1, b2, b3, c1, c2, c3),
            SpecialCase::FD3 { a, b: [b1, b2, b3], c } => lauricella_fd3(a, b1, b2, b3, c),
            SpecialCase::HA { a, b1, b2, c1, c2 } => srivastava_ha(a, b1, b2, c1, c2),
        }
    }

    /// The identity instance this case specializes to.
    pub fn instance(&self, t: S, args: ArgumentTriple<S>) -> IdentityInstance<S> {
        let id = self.id().identity();
        IdentityInstance {
            id,
            ps: self.parameter_set(),
            i: id.family().map(|_| 1),
            scalars: FreeScalars::t(t),
            args,
        }
    }
}

/// Checks the summation formula of a special function at shift scalar `t`.
pub fn check_special_case<S: Scalar>(
    case: &SpecialCase<S>,
    t: S,
    args: ArgumentTriple<S>,
    policy: &IdentityPolicy,
    tol: f64,
) -> CheckReport<S> {
    let mut report = check_identity(&case.instance(t, args), policy, tol);
    report.id = case.id().to_string();
    report
}
