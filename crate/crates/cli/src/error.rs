use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Core(btps_core::Error),
    #[error("numerical failure in {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::UnknownPreset(_) | CliError::Core(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    /// Offending config field, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Config { field, .. } => Some(field),
            CliError::UnknownPreset(_) => Some("preset"),
            _ => None,
        }
    }
}

impl From<btps_core::Error> for CliError {
    fn from(e: btps_core::Error) -> Self {
        match e {
            btps_core::Error::NumericalFailure { context } => CliError::Numerical(context),
            other => CliError::Core(other),
        }
    }
}
