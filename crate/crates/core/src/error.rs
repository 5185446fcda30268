use thiserror::Error;

/// Errors raised by the map and cone routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not self-adjoint: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("pairing of Hermitian matrices has imaginary part {0:.3e}")]
    ComplexPairing(f64),

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("the zero vector has no Schmidt decomposition")]
    ZeroVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not PPT: {0}")]
    NotPpt(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
