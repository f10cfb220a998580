//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MqteError {
    /// A single argument or input value is out of range or malformed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Config validation failed; every violated field is listed.
    #[error("invalid config:\n{}", .violations.join("\n"))]
    Config { violations: Vec<String> },

    /// Requested run exceeds the configured trajectory cost cap.
    #[error(
        "trajectory cost {estimate:.3e} exceeds cap {cap:.3e}; {suggestion}"
    )]
    BudgetExceeded {
        estimate: f64,
        cap: f64,
        suggestion: String,
    },

    /// Register size, grid extent, or similar above the supported cap.
    #[error("{what} capped at {cap}, got {got}")]
    TooLarge {
        what: &'static str,
        cap: usize,
        got: usize,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),
}

impl MqteError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        MqteError::InvalidInput(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        MqteError::Parse(msg.into())
    }

    /// Process exit code: 1 for validation problems, 2 for infeasible budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            MqteError::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, MqteError>;
