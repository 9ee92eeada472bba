use thiserror::Error;

use crate::linalg::Eigenpair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The power method hit its iteration cap. The last normalized iterate
    /// and its ratio estimate are kept so callers can still use them.
    #[error("power method did not converge after {iters} iterations")]
    NotConverged { iters: usize, last: Box<Eigenpair> },

    #[error("degenerate objective: the direction vector is zero")]
    DegenerateObjective,

    #[error("LP infeasible")]
    LpInfeasible,

    #[error("LP unbounded")]
    LpUnbounded,

    #[error("invalid row set: {0}")]
    InvalidRowSet(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("family too large for enumeration: {size} matrices (limit {limit})")]
    TooLarge { size: u128, limit: u128 },

    #[error("uncertainty sets must be strictly positive: {0}")]
    NonPositiveEntry(String),

    #[error("degenerate eigenvector pair: (u, v) = 0")]
    DegenerateEigenpair,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
