use thiserror::Error;

/// Errors produced by the numerical routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// A descent solver increased the energy past its backtracking budget.
    /// The trace holds the accepted energies up to the failure.
    #[error("solver diverged: {message}")]
    Divergence { message: String, trace: Vec<f64> },

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
