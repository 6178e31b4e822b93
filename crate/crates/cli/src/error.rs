use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unreadable input.
    #[error("{0}")]
    Usage(String),
    /// A computation exceeded a configured budget.
    #[error("{0}")]
    Budget(String),
    /// Any other library failure.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Budget(_) => "budget",
            CliError::Failed(_) => "failed",
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": self.kind(), "message": self.to_string(), "code": self.exit_code()}).to_string()
    }
}

/// Malformed input documents are usage errors.
pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn failed<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failed(e.to_string())
}
