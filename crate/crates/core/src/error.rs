//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by pipeline operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad ranges, non-integer grid shapes, ...).
    #[error("config error: {0}")]
    Config(String),

    /// A value violated an operation's domain (score outside [0,1], zero weights, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Text parse failure, 1-based line number included.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A calibration matrix could not be inverted.
    #[error("singular calibration: {0}")]
    SingularCalib(String),

    /// A statistic is undefined for the given data (constant sequence, zero ground truths).
    #[error("undefined statistic: {0}")]
    Undefined(String),

    /// Frame ids present on one side of an evaluation but not the other.
    #[error("missing frames: {}", .0.join(", "))]
    MissingFrames(Vec<String>),

    /// Scene generation could not satisfy the non-overlap constraint.
    #[error("placement failed: placed {placed} of {requested} objects without overlap")]
    Placement { requested: usize, placed: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for CLI use: 1 for usage/config errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
