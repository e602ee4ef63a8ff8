//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when constructing states or evaluating measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries must all be finite")]
    NonFinite,

    #[error(
        "matrix is not Hermitian: max |m - m^H| = {deviation:.3e} exceeds tolerance {tol:.3e}"
    )]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tol:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tol: f64 },

    #[error("trace must equal 1, got {trace:.12}")]
    TraceNotOne { trace: f64 },

    #[error("state vector must have unit norm, got {norm:.12}")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid subsystem selection: {context}")]
    InvalidSubsystems { context: String },

    #[error("vectors are not orthonormal: max Gram deviation {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },

    #[error("matrix is not unitary: max |U^H U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid probabilities: {context}")]
    InvalidProbabilities { context: String },

    #[error("invalid parameter: {context}")]
    InvalidParameter { context: String },

    #[error("unsupported dimensions: {context}")]
    UnsupportedDims { context: String },

    #[error("invalid state file: {context}")]
    InvalidStateFile { context: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
