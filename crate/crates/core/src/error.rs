use thiserror::Error;

use crate::params::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot mix float64 and rational operands")]
    MixedBackends,

    #[error("index {index} is out of range for family {family} of length {len}")]
    InvalidIndex {
        family: Family,
        index: usize,
        len: usize,
    },

    #[error("denominator Pochhammer symbol vanishes: {0}")]
    DenominatorPole(String),

    #[error("binomial series has a pole at t = 1")]
    PoleAtOne,

    #[error("power {base}^({exponent}) is not representable in the rational backend")]
    InexactPower { base: String, exponent: String },

    #[error("series did not converge after {terms} terms (last magnitude {last_magnitude:e})")]
    NotConverged { terms: usize, last_magnitude: f64 },

    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid identity instance: {0}")]
    InvalidInstance(String),

    #[error("parse error: {0}")]
    Parse(String),
}
