use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("coupling parameter {alpha} outside the admissible range: {reason}")]
    Domain { alpha: String, reason: &'static str },

    #[error("coupling parameter alpha = 1 is a pole of the d-roots")]
    Pole,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("integration failed at t = {time}: non-finite state")]
    IntegrationFailure { time: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
