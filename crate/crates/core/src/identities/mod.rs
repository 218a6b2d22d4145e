//! Registry and checker for the infinite summation formulas of `F^(3)`,
//! plus the classical closed forms used for their inner sums.

mod engine;
pub mod lemmas;
mod registry;

pub use engine::{
    check_identity, lhs_value, relative_residual, rhs_parameters, rhs_value, CheckReport, FreeScalars, IdentityInstance,
    IdentityPolicy,
};
pub use lemmas::{
    binomial_1f0, nearly_poised_3f2, saalschutz_3f2, twob_balanced_3f2, vandermonde_2f1, watson_4f3, Lemma,
};
pub use registry::{
    Affine, ArgMap, Edit, Extra, FreeScalar, Guard, IdentityId, IdentitySpec, OuterBase, Prefactor, Selection,
    ShiftRule,
};
