use std::path::{Path, PathBuf};

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validity check failed: {0}")]
    Validity(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Wraps a core error raised while building the `block` section.
    pub fn from_core(block: &str, e: eitgap::Error) -> Self {
        use eitgap::Error as E;
        match e {
            E::NumericalFailure { context } => CliError::Numerical(context),
            E::InvalidParameter { name, reason } => CliError::Config(format!("[{block}] {name}: {reason}")),
            other => CliError::Config(format!("[{block}] {other}")),
        }
    }

    /// 0 is success; 1 config or I/O; 2 numerical failure; 3 strict check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Validity(_) => 3,
        }
    }
}

impl From<eitgap::Error> for CliError {
    fn from(e: eitgap::Error) -> Self {
        CliError::from_core("run", e)
    }
}
