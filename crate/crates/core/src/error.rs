use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("variable x{index} exceeds field dimension {n}")]
    DimensionMismatch { index: usize, n: usize },
    #[error("evaluation outside the smoothness domain: {0}")]
    Domain(String),
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("boundary transversality unverified near {witness:?}")]
    BoundaryTransversalityUnverified { witness: Vec<f64> },
    #[error("non-transverse at grid scale")]
    NonTransverseGrid,
    #[error("zero set meets the disk boundary")]
    ZeroSetMeetsBoundary,
    #[error("empty zero set")]
    EmptyZeroSet,
    #[error("ill-conditioned fit at degree {degree} (condition estimate {condition:e})")]
    IllConditioned { degree: usize, condition: f64 },
    #[error("degree budget exhausted; best (degree, error) = {best:?}")]
    BudgetExhausted { best: (usize, f64), trace: Vec<(usize, f64)> },
    #[error("degenerate input: delta = 0")]
    Degenerate,
    #[error("check failed: {inequality} (worst witness {witness:?}, value {value:e})")]
    CheckFailed { inequality: String, witness: Vec<f64>, value: f64 },
}
