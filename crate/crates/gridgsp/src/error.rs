//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by construction, validation, and solver paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dimension: {0}")]
    EmptyDimension(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { max_asymmetry: f64, tol: f64 },

    #[error("diagonal entry {index} is not real: imaginary part {imag:.3e} exceeds tolerance {tol:.3e}")]
    DiagonalNotReal { index: usize, imag: f64, tol: f64 },

    #[error(
        "imaginary residual {residual:.3e} of Hermitian quadratic form exceeds bound {bound:.3e}; \
         the operator is likely not Hermitian"
    )]
    ImaginaryResidual { residual: f64, bound: f64 },

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed linear program: {0}")]
    LpConstruction(String),

    #[error("precision estimate must be symmetrized before use")]
    NotSymmetrized,

    #[error("Cholesky factorization failed; matrix is not positive definite")]
    CholeskyFailed,

    #[error("non-positive curvature detected at CG iteration {iteration}; operator is not positive definite (run ensure_pd on the Laplacian)")]
    NegativeCurvature { iteration: usize },

    #[error("sampling pattern observes every node; no unobserved entries to score")]
    AllObserved,

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("json error: {0}")]
    Json(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
