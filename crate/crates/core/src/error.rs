use thiserror::Error;

/// Errors produced by the capacity library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid coisotropic index (n = {n}, k = {k}): need n >= 1 and 0 <= k <= n")]
    InvalidIndex { n: usize, k: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("tangential crossing of the q-axis near q = {q:.6}")]
    TangentialCrossing { q: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
