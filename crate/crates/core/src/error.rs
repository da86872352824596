use thiserror::Error;

pub type Result<T> = std::result::Result<T, QcardError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QcardError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported dimension {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector {index} is linearly dependent on its predecessors (residual norm {residual:e})")]
    Degenerate { index: usize, residual: f64 },

    #[error("basis vectors phi{i} and phi{j} are not orthogonal (overlap {residual:e})")]
    Constraint { i: usize, j: usize, residual: f64 },

    #[error("empty search domain [{lo}, {hi}]")]
    EmptyDomain { lo: f64, hi: f64 },
}
