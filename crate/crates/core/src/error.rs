use thiserror::Error;

/// Errors produced by model construction, evaluation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Instance, scenario or assortment data violates a model invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation is not defined for this configuration (e.g. wrong top-priority depth).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// No feasible assortment is left to optimize over.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Instance is too large for exhaustive enumeration.
    #[error("instance too large for enumeration: n = {n} exceeds guard {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
