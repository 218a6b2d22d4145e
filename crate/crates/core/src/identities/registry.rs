//! The summation formulas as data.
//!
//! Each formula has the shape
//!
//! ```text
//! sum_k weight_k * F^(3)[ps shifted by k; lhs args] = prefactor * F^(3)[edited ps; rhs args]
//! ```
//!
//! where `weight_k` is a product of Pochhammer symbols times `base^k / k!`.
//! One table row per formula; [`super::engine`] interprets the rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Scalar;
use crate::params::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    T1a,
    T1b,
    T1c,
    T2x1,
    T2x2,
    T2x3,
    T3a,
    T3c,
    T4a,
    T4c,
    T5c,
    T6a,
    T6c,
    T7c,
    T8c,
    T9c,
    T10c,
}

impl IdentityId {
    pub const ALL: [IdentityId; 17] = [
        IdentityId::T1a,
        IdentityId::T1b,
        IdentityId::T1c,
        IdentityId::T2x1,
        IdentityId::T2x2,
        IdentityId::T2x3,
        IdentityId::T3a,
        IdentityId::T3c,
        IdentityId::T4a,
        IdentityId::T4c,
        IdentityId::T5c,
        IdentityId::T6a,
        IdentityId::T6c,
        IdentityId::T7c,
        IdentityId::T8c,
        IdentityId::T9c,
        IdentityId::T10c,
    ];

    pub fn as_str(self) -> &'static str {
        self.spec().name
    }

    /// Equation label, e.g. `(1s2)`.
    pub fn label(self) -> &'static str {
        self.spec().label
    }

    /// Family holding the distinguished entry `i`, if the formula has one.
    pub fn family(self) -> Option<Family> {
        self.spec().family
    }

    pub fn scalars(self) -> &'static [FreeScalar] {
        self.spec().scalars
    }

    pub fn spec(self) -> &'static IdentitySpec {
        &REGISTRY[self as usize]
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bare = s.trim_start_matches('(').trim_end_matches(')');
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s || id.label().trim_matches(['(', ')']) == bare)
            .ok_or_else(|| Error::Parse(format!("unknown identity '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeScalar {
    T,
    R,
    D,
}

impl FreeScalar {
    pub fn name(self) -> &'static str {
        match self {
            FreeScalar::T => "t",
            FreeScalar::R => "r",
            FreeScalar::D => "d",
        }
    }
}

/// `entry * v + r * r + d * d + constant` with small rational coefficients,
/// `v` being the distinguished entry (`a_i` or `c_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub entry: (i64, i64),
    pub r: (i64, i64),
    pub d: (i64, i64),
    pub constant: (i64, i64),
}

const ZERO: (i64, i64) = (0, 1);
const ONE: (i64, i64) = (1, 1);
const HALF: (i64, i64) = (1, 2);

impl Affine {
    const fn new(entry: (i64, i64), r: (i64, i64), d: (i64, i64), constant: (i64, i64)) -> Self {
        Self {
            entry,
            r,
            d,
            constant,
        }
    }

    pub fn eval<S: Scalar>(&self, v: &S, r: &S, d: &S) -> S {
        let term = |c: (i64, i64), x: &S| {
            if c.0 == 0 {
                S::zero()
            } else {
                S::from_ratio(c.0, c.1) * x
            }
        };
        term(self.entry, v) + term(self.r, r) + term(self.d, d) + S::from_ratio(self.constant.0, self.constant.1)
    }
}

/// Which Pochhammer symbols enter the outer weight, or which entries get
/// shifted by `k` inside the left-hand series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Only the distinguished entry.
    Entry,
    /// Every entry of every family whose index combination contains `m_{j+1}`.
    Along(usize),
    /// As `Along`, minus the distinguished entry.
    AlongExceptEntry(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    /// Add `k` to the selected entries.
    Shift(Selection),
    /// Replace the distinguished entry by `-k`.
    EntryToNegK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extra {
    /// `(param)_k`, in the numerator or the denominator of the weight.
    Rising { param: Affine, denominator: bool },
    /// `(p)_k (1 + p/2)_k / (p/2)_k`, evaluated as `(p+1)_{k-1} (p+2k)` so
    /// that `p = 0` takes its limiting value.
    NearlyPoised { param: Affine },
}

/// Base raised to the power `k` in the weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBase {
    T,
    NegT,
    X1,
    NegX1,
    /// `(t + x1) / (x1 - 1)`
    ShiftedRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgMap {
    Identity,
    /// Divide the flagged arguments by `1 - t`.
    DivideByOneMinusT([bool; 3]),
    /// Add `t` to argument `j`.
    AddT(usize),
    /// `x1 -> (1 + t) x1 / t`
    ScaleFirstByOnePlusTOverT,
    /// `x1 -> (1 + t) x1 / (t + x1)`
    ScaleFirstByOnePlusTOverTPlusX1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    /// Overwrite the distinguished entry.
    Replace(Affine),
    Push(Family, Affine),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefactor {
    One,
    /// `(1 - t)^(-v)`
    OneMinusTPowNegEntry,
    /// `(1 + t)^(-v)`
    OnePlusTPowNegEntry,
    /// `((1 - x1) / (1 + t))^v`
    RatioPowEntry,
}

/// Conservative region where the outer series is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guard {
    None,
    /// `|t| < 1`
    TBelowOne,
    /// `|(t + x1) / (x1 - 1)| < 1`
    ShiftedRatioBelowOne,
}

#[derive(Debug, Clone, Copy)]
pub struct IdentitySpec {
    pub id: IdentityId,
    pub name: &'static str,
    pub label: &'static str,
    pub family: Option<Family>,
    pub scalars: &'static [FreeScalar],
    pub weight: Selection,
    pub shift: ShiftRule,
    pub extras: &'static [Extra],
    pub base: OuterBase,
    pub lhs_args: ArgMap,
    pub rhs_edits: &'static [Edit],
    pub rhs_args: ArgMap,
    pub prefactor: Prefactor,
    pub guard: Guard,
}

use Selection::{Along, AlongExceptEntry, Entry};

const V: Affine = Affine::new(ONE, ZERO, ZERO, ZERO);
const V_PLUS_R: Affine = Affine::new(ONE, ONE, ZERO, ZERO);
const V_PLUS_D: Affine = Affine::new(ONE, ZERO, ONE, ZERO);
const V_MINUS_D: Affine = Affine::new(ONE, ZERO, (-1, 1), ZERO);
const V_PLUS_R_PLUS_D: Affine = Affine::new(ONE, ONE, ONE, ZERO);
const R: Affine = Affine::new(ZERO, ONE, ZERO, ZERO);
const D: Affine = Affine::new(ZERO, ZERO, ONE, ZERO);
// 2 + d - v
const TWO_PLUS_D_MINUS_V: Affine = Affine::new((-1, 1), ZERO, ONE, (2, 1));
// v - d - 1
const V_MINUS_D_MINUS_ONE: Affine = Affine::new(ONE, ZERO, (-1, 1), (-1, 1));
// 1 + d - v
const ONE_PLUS_D_MINUS_V: Affine = Affine::new((-1, 1), ZERO, ONE, ONE);
const HALF_V: Affine = Affine::new(HALF, ZERO, ZERO, ZERO);
const NEG_HALF_V: Affine = Affine::new((-1, 2), ZERO, ZERO, ZERO);
// 1 + (v + r)/2
const ONE_PLUS_HALF_V_PLUS_R: Affine = Affine::new(HALF, HALF, ZERO, ONE);
// (v + r)/2
const HALF_V_PLUS_R: Affine = Affine::new(HALF, HALF, ZERO, ZERO);
// 1 + r + v/2
const ONE_PLUS_R_PLUS_HALF_V: Affine = Affine::new(HALF, ONE, ZERO, ONE);
// 1 + d + v/2
const ONE_PLUS_D_PLUS_HALF_V: Affine = Affine::new(HALF, ZERO, ONE, ONE);

const fn rising(param: Affine) -> Extra {
    Extra::Rising {
        param,
        denominator: false,
    }
}

const fn rising_denominator(param: Affine) -> Extra {
    Extra::Rising {
        param,
        denominator: true,
    }
}

const T_ONLY: &[FreeScalar] = &[FreeScalar::T];
const R_ONLY: &[FreeScalar] = &[FreeScalar::R];
const D_ONLY: &[FreeScalar] = &[FreeScalar::D];
const R_AND_D: &[FreeScalar] = &[FreeScalar::R, FreeScalar::D];

const fn binomial(id: IdentityId, name: &'static str, label: &'static str, family: Family, scaled: [bool; 3]) -> IdentitySpec {
    IdentitySpec {
        id,
        name,
        label,
        family: Some(family),
        scalars: T_ONLY,
        weight: Entry,
        shift: ShiftRule::Shift(Entry),
        extras: &[],
        base: OuterBase::T,
        lhs_args: ArgMap::Identity,
        rhs_edits: &[],
        rhs_args: ArgMap::DivideByOneMinusT(scaled),
        prefactor: Prefactor::OneMinusTPowNegEntry,
        guard: Guard::TBelowOne,
    }
}

const fn shifted_argument(id: IdentityId, name: &'static str, label: &'static str, j: usize) -> IdentitySpec {
    IdentitySpec {
        id,
        name,
        label,
        family: None,
        scalars: T_ONLY,
        weight: Along(j),
        shift: ShiftRule::Shift(Along(j)),
        extras: &[],
        base: OuterBase::T,
        lhs_args: ArgMap::Identity,
        rhs_edits: &[],
        rhs_args: ArgMap::AddT(j),
        prefactor: Prefactor::One,
        guard: Guard::None,
    }
}

/// Formulas whose inner sum over `m1` is a terminating series at unit argument.
#[allow(clippy::too_many_arguments)]
const fn inner_sum(
    id: IdentityId,
    name: &'static str,
    label: &'static str,
    family: Family,
    scalars: &'static [FreeScalar],
    shift_entry_too: bool,
    extras: &'static [Extra],
    base: OuterBase,
    rhs_edits: &'static [Edit],
) -> IdentitySpec {
    IdentitySpec {
        id,
        name,
        label,
        family: Some(family),
        scalars,
        weight: AlongExceptEntry(0),
        shift: if shift_entry_too {
            ShiftRule::Shift(Along(0))
        } else {
            ShiftRule::Shift(AlongExceptEntry(0))
        },
        extras,
        base,
        lhs_args: ArgMap::Identity,
        rhs_edits,
        rhs_args: ArgMap::Identity,
        prefactor: Prefactor::One,
        guard: Guard::None,
    }
}

const fn terminating(
    id: IdentityId,
    name: &'static str,
    label: &'static str,
    base: OuterBase,
    lhs_args: ArgMap,
    prefactor: Prefactor,
    guard: Guard,
) -> IdentitySpec {
    IdentitySpec {
        id,
        name,
        label,
        family: Some(Family::C),
        scalars: T_ONLY,
        weight: Entry,
        shift: ShiftRule::EntryToNegK,
        extras: &[],
        base,
        lhs_args,
        rhs_edits: &[],
        rhs_args: ArgMap::Identity,
        prefactor,
        guard,
    }
}

static REGISTRY: [IdentitySpec; 17] = [
    binomial(IdentityId::T1a, "T1a", "(1s2)", Family::A, [true, true, true]),
    binomial(IdentityId::T1b, "T1b", "(t1s2)", Family::B, [true, true, false]),
    binomial(IdentityId::T1c, "T1c", "(t2s2)", Family::C, [true, false, false]),
    shifted_argument(IdentityId::T2x1, "T2x1", "(s3)", 0),
    shifted_argument(IdentityId::T2x2, "T2x2", "(t1s3)", 1),
    shifted_argument(IdentityId::T2x3, "T2x3", "(t2s3)", 2),
    // a_i -> a_i + r, a_i joins (b'), a_i + r joins (g')
    inner_sum(
        IdentityId::T3a,
        "T3a",
        "(s4)",
        Family::A,
        R_ONLY,
        false,
        &[rising(R)],
        OuterBase::X1,
        &[Edit::Replace(V_PLUS_R), Edit::Push(Family::Bp, V), Edit::Push(Family::Gp, V_PLUS_R)],
    ),
    inner_sum(
        IdentityId::T3c,
        "T3c",
        "(t1s4)",
        Family::C,
        R_ONLY,
        false,
        &[rising(R)],
        OuterBase::X1,
        &[Edit::Replace(V_PLUS_R)],
    ),
    inner_sum(
        IdentityId::T4a,
        "T4a",
        "(1s6)",
        Family::A,
        D_ONLY,
        true,
        &[rising(D)],
        OuterBase::NegX1,
        &[Edit::Push(Family::C, V_MINUS_D), Edit::Push(Family::H, V)],
    ),
    inner_sum(
        IdentityId::T4c,
        "T4c",
        "(m2s6)",
        Family::C,
        D_ONLY,
        true,
        &[rising(D)],
        OuterBase::NegX1,
        &[Edit::Replace(V_MINUS_D)],
    ),
    inner_sum(
        IdentityId::T5c,
        "T5c",
        "(l2s6)",
        Family::C,
        R_AND_D,
        false,
        &[rising(D), rising(R), rising_denominator(V_PLUS_R_PLUS_D)],
        OuterBase::X1,
        &[
            Edit::Replace(V_PLUS_R),
            Edit::Push(Family::C, V_PLUS_D),
            Edit::Push(Family::H, V_PLUS_R_PLUS_D),
        ],
    ),
    inner_sum(
        IdentityId::T6a,
        "T6a",
        "(n2s6)",
        Family::A,
        D_ONLY,
        true,
        &[Extra::NearlyPoised { param: D }],
        OuterBase::NegX1,
        &[
            Edit::Push(Family::C, TWO_PLUS_D_MINUS_V),
            Edit::Push(Family::C, V_MINUS_D_MINUS_ONE),
            Edit::Push(Family::H, ONE_PLUS_D_MINUS_V),
            Edit::Push(Family::H, V),
        ],
    ),
    inner_sum(
        IdentityId::T6c,
        "T6c",
        "(t2s6)",
        Family::C,
        D_ONLY,
        true,
        &[Extra::NearlyPoised { param: D }],
        OuterBase::NegX1,
        &[
            Edit::Replace(TWO_PLUS_D_MINUS_V),
            Edit::Push(Family::C, V_MINUS_D_MINUS_ONE),
            Edit::Push(Family::H, ONE_PLUS_D_MINUS_V),
        ],
    ),
    inner_sum(
        IdentityId::T7c,
        "T7c",
        "(2s7)",
        Family::C,
        R_ONLY,
        false,
        &[rising(R), rising(NEG_HALF_V), rising_denominator(ONE_PLUS_R_PLUS_HALF_V)],
        OuterBase::X1,
        &[
            Edit::Replace(V_PLUS_R),
            Edit::Push(Family::C, HALF_V),
            Edit::Push(Family::C, ONE_PLUS_HALF_V_PLUS_R),
            Edit::Push(Family::H, ONE_PLUS_R_PLUS_HALF_V),
            Edit::Push(Family::H, HALF_V_PLUS_R),
        ],
    ),
    inner_sum(
        IdentityId::T8c,
        "T8c",
        "(t2s7)",
        Family::C,
        D_ONLY,
        false,
        &[
            Extra::NearlyPoised { param: D },
            rising(NEG_HALF_V),
            rising_denominator(ONE_PLUS_D_PLUS_HALF_V),
        ],
        OuterBase::X1,
        &[
            Edit::Replace(HALF_V),
            Edit::Push(Family::C, V_PLUS_D),
            Edit::Push(Family::H, ONE_PLUS_D_PLUS_HALF_V),
        ],
    ),
    terminating(
        IdentityId::T9c,
        "T9c",
        "(10s1)",
        OuterBase::NegT,
        ArgMap::ScaleFirstByOnePlusTOverT,
        Prefactor::OnePlusTPowNegEntry,
        Guard::TBelowOne,
    ),
    terminating(
        IdentityId::T10c,
        "T10c",
        "(10s2)",
        OuterBase::ShiftedRatio,
        ArgMap::ScaleFirstByOnePlusTOverTPlusX1,
        Prefactor::RatioPowEntry,
        Guard::ShiftedRatioBelowOne,
    ),
];
