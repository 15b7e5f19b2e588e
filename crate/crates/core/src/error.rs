use thiserror::Error;

/// Errors raised by instance handling, reductions, solvers and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed instance: {0}")]
    Malformed(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("dependent basis: rank {rank} < {n} vectors")]
    DependentBasis { rank: usize, n: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("over budget: {what} needs {requested}, cap is {cap} (raise with GAPKIT_BUDGET)")]
    OverBudget {
        what: &'static str,
        requested: String,
        cap: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed metric: {0}")]
    InvalidMetric(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
