use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or schema-invalid space or scenario file.
    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    /// A step failed; the runner records it and moves on.
    #[error("step `{step}` failed: {source}")]
    Step {
        step: String,
        #[source]
        source: collarbound::Error,
    },

    #[error("no `{0}` series in the results")]
    MissingSeries(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(path: impl Into<PathBuf>, message: impl std::fmt::Display) -> Self {
        Self::Config { path: path.into(), message: message.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
