//! Evaluation of the general triple hypergeometric series `F^(3)` and
//! machine checks of its infinite summation formulas.

pub mod cli;
pub mod error;
pub mod identities;
pub mod numerics;
pub mod params;
pub mod series;
pub mod special;
pub mod suite;

pub use error::{Error, Result};
