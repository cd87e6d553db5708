//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Library-wide error type.
///
/// The three broad classes map onto distinct process exit codes in the
/// CLI: invalid input (2), infeasible scale (3), consistency failure (4).
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible scale: {0}")]
    Infeasible(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed cache file: {0}")]
    CacheFormat(String),
}

impl CoreError {
    pub fn input(msg: impl Into<String>) -> Self {
        CoreError::Input(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        CoreError::Infeasible(msg.into())
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        CoreError::Consistency(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CoreError::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
