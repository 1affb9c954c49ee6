use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("scenario mismatch at party {party}: {detail}")]
    ScenarioMismatch { party: usize, detail: String },

    #[error("unsupported scenario: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("scenario too large: {count} exceeds cap {cap}")]
    TooLarge { count: u128, cap: u128 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
