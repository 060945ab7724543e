use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid set spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cell budget exceeded: {requested} > {cap}")]
    BudgetExceeded { requested: usize, cap: usize },
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("no set points inside the query ball")]
    EmptyIntersection,
    #[error("insufficient scales: {0}")]
    InsufficientScales(String),
    #[error("degenerate exponent: {0}")]
    DegenerateExponent(String),
    #[error("grid too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
