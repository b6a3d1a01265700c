use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dimension {dim} outside supported range {min}..={max}")]
    DimOutOfRange { dim: usize, min: usize, max: usize },
    #[error("expected a grade-1 multivector")]
    NotVector,
    #[error("zero vector has no inverse")]
    ZeroVector,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("map is not positive: smallest eigenvalue of the symmetric part is {0:e}")]
    NotPositive(f64),
    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid spec mismatch")]
    SpecMismatch,
    #[error("expected a {expected} field, got a {found} field")]
    DomainMismatch { expected: &'static str, found: &'static str },
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("coefficient sup-norm {0} is not below 1")]
    NotContraction(f64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("coefficient is not self-dual: {0}")]
    NotSelfDual(String),
    #[error("compatibility condition violated: {0}")]
    Compatibility(String),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
