//! Scalar backends, Pochhammer symbols and truncated summation.

mod number;
mod pochhammer;
mod scalar;
mod truncation;

pub use number::{Backend, Number};
pub use pochhammer::{pochhammer, pochhammer_product};
pub use scalar::{power, Scalar};
pub use truncation::{adaptive_sum, try_adaptive_sum, EvaluationResult, StallMonitor, TruncationPolicy};
