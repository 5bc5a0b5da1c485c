use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] siegel_renorm::Error),
    #[error("argument error: {0}")]
    Arg(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit code: 2 for usage errors, 3 for numeric-regime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Arg(_) | CliError::Config(_) => 2,
            CliError::Core(e) if e.is_regime() => 3,
            // A terminating expansion means theta violated the irrationality precondition.
            CliError::Core(
                siegel_renorm::Error::InvalidInput(_)
                | siegel_renorm::Error::TerminatedExpansion { .. },
            ) => 2,
            _ => 1,
        }
    }
}
