use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] anonytope_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Csv { path: PathBuf, message: String },

    #[error("{}: no data rows", path.display())]
    NoDataRows { path: PathBuf },

    #[error("column `{0}` not found in the input header")]
    MissingColumn(String),

    #[error("configuration: {0}")]
    Config(String),

    /// Requested k cannot be met; carries the user-facing explanation.
    #[error("{0}")]
    Infeasible(String),

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Infeasible(_) | Self::CheckFailed(_) => 2,
            Self::Core(anonytope_core::Error::Infeasible { .. }) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
