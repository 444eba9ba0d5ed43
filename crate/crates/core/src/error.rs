use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("fields live on different boxes")]
    BoxMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("block index {index} outside -1..={max}")]
    BlockIndex { index: i32, max: i32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("fixed-point map is not contracting (factor {factor:.3}); increase eta")]
    NotContracting { factor: f64 },
    #[error("renormalisation tail bound {bound:e} above tolerance {tol:e}")]
    TailBound { bound: f64, tol: f64 },
    #[error("root bracket not found: {0}")]
    Bracket(String),
    #[error("ascent stalled without improvement: {0}")]
    Stagnation(String),
    #[error("malformed grid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
