use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |a_kl - conj(a_lk)| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("shape mismatch: expected {expected}, got {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("{given} columns cannot fit in dimension {dim}")]
    TooManyColumns { given: usize, dim: usize },

    #[error("not a density matrix: {reason}")]
    NotState { reason: String },

    #[error("matrix is not positive semidefinite (most negative eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("diagonal entry {index} is {value}, expected 1")]
    BadDiagonal { index: usize, value: String },

    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("dimension {0} is not allowed here (need d >= 2)")]
    BadDimension(usize),

    #[error("not a probability distribution: {0}")]
    NotDistribution(String),

    #[error("no flat decomposition found after {restarts} restarts (best residual {residual:e})")]
    NoDecompositionFound { residual: f64, restarts: usize },

    #[error("decomposition does not verify: {0}")]
    VerificationFailure(String),

    #[error("recovery failed: residual {residual:e}")]
    RecoveryFailure { residual: f64 },

    #[error("POVM is not complete (deviation {deviation:e})")]
    IncompletePovm { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
