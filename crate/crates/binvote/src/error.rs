use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("alternative {index} out of range 1..={m}")]
    AlternativeOutOfRange { index: usize, m: usize },
    #[error("invalid utility profile: {0}")]
    InvalidUtilities(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid score vector: {0}")]
    InvalidScores(String),
    #[error("degenerate rule: {0}")]
    DegenerateRule(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large: {required:.3e} outcomes exceed the limit of {limit:.0e}")]
    InstanceTooLarge { required: f64, limit: f64 },
    #[error("quadrature did not converge (achieved error estimate {achieved:.3e})")]
    Quadrature { achieved: f64 },
    #[error("construction constraint violated: {0}")]
    Constraint(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
