use thiserror::Error;

/// Failures after the command line has been parsed.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] transasym_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    pub fn json(path: &std::path::Path, source: serde_json::Error) -> Self {
        Self::Json { path: path.display().to_string(), source }
    }
}
