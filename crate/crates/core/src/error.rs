use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrobError {
    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("S-matrix is degenerate: |det| = {det:e} is below {threshold:e}")]
    NondegeneracyFailure { det: f64, threshold: f64 },

    #[error("algebra is not special: {0}")]
    NotSpecial(String),

    #[error("label {label} is not invertible (d = {qdim})")]
    NotInvertible { label: usize, qdim: f64 },

    #[error("projector trace {trace} is not within {tolerance:e} of an integer")]
    NonIntegralTrace { trace: C64, tolerance: f64 },

    #[error("idempotent splitting failed: {0}")]
    SplitFailure(String),

    #[error("the zero object cannot carry an algebra structure")]
    ZeroObject,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FrobError>;
