//! Formula algorithms: horizon, normal forms, Boolean and quantitative semantics.

mod batch;
mod semantics;
mod transform;

use thiserror::Error;

#[cfg(feature = "parallel")]
pub use batch::batch_robustness_parallel;
pub use batch::{batch_robustness, batch_robustness_sequential, BatchError};
pub use semantics::{agm_and, agm_or, agm_robustness, evaluate, evaluate_bool, robustness, wstl_robustness, Method};
pub use transform::{horizon, negate, pnf};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpsError {
    #[error("negation of Until is not supported")]
    UnsupportedNegation,
    #[error("{0} is not supported by this semantics")]
    UnsupportedOperator(&'static str),
    #[error("trace too short: needs {needed} samples, has {got}")]
    TraceTooShort { needed: usize, got: usize },
    #[error("signal `{0}` missing from trace")]
    MissingSignal(String),
    #[error("no bounds given for signal `{0}`")]
    MissingBound(String),
    #[error("unknown weight `{0}`")]
    UnknownWeight(String),
    #[error("weight `{name}` has {got} entries, expected {expected}")]
    WeightArityMismatch { name: String, expected: usize, got: usize },
}
