use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number: {0}")]
    InvalidSpin(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "eigensolver failed on a {dim}x{dim} matrix (j = {j}, kappa = {kappa}, alpha = {alpha})"
    )]
    Eigensolver {
        dim: usize,
        j: f64,
        kappa: f64,
        alpha: f64,
    },

    #[error(
        "eigenvector {index} has parity expectation {expectation:.3e}; \
         degenerate subspace needs re-orthogonalization"
    )]
    DegenerateSubspace { index: usize, expectation: f64 },

    #[error("no crossing of {threshold} found for alpha = {alpha} with kappa in [0, {kappa_max}]")]
    NoCrossing {
        alpha: f64,
        threshold: f64,
        kappa_max: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("eigensystem cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
