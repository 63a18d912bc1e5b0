use thiserror::Error;

/// Failures of a command, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Schema(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}
