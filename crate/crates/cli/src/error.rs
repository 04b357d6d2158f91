use chns_core::ChnsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Solver(#[from] ChnsError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("check failed: {}", .0.join("; "))]
    CheckFailed(Vec<String>),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// 0 ok, 1 config, 2 solver, 3 failed check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 1,
            CliError::Solver(ChnsError::InvalidParameter(_) | ChnsError::InvalidGrid(_)) => 1,
            CliError::Solver(_) | CliError::Io { .. } => 2,
            CliError::CheckFailed(_) => 3,
        }
    }
}
