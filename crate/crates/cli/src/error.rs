use thiserror::Error;

/// Failure of a command, split by who has to act on it.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or config values; nothing was run.
    #[error("{0}")]
    Usage(String),
    /// Data or I/O problem met while running.
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
