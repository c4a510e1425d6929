use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EssError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index pair ({i}, {j}) out of range for {n} points")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    /// Cholesky hit a pivot `<= 1e-12` or a non-finite value. `block` is set
    /// when the failing matrix was a diagonal block of a blocking.
    #[error("{} not positive definite (pivot {pivot})", match .block { Some(b) => format!("block {b} is"), None => "matrix is".to_string() })]
    NotPositiveDefinite { pivot: usize, block: Option<usize> },

    #[error("model is not stationary: {0}")]
    NonStationary(String),

    #[error("invalid blocking: {0}")]
    InvalidBlocking(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A size limit of a dense or exhaustive computation was exceeded.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// `ΣΣλ_uv` came out non-positive, which only happens through rounding.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl EssError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        EssError::InvalidParameter(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        EssError::DimensionMismatch(msg.into())
    }
}

impl From<std::io::Error> for EssError {
    fn from(e: std::io::Error) -> Self {
        EssError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EssError>;
