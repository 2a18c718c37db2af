use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point sets overlap: point {index} of Y also lies in Z")]
    Overlap { index: usize },

    #[error("solver budget exceeded after {nodes} nodes (bounds {lower}..={upper})")]
    BudgetExceeded { nodes: u64, lower: f64, upper: f64 },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
