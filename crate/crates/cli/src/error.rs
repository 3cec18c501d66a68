use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("{path}: cannot decode image: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no ground truth for image '{0}'")]
    MissingGroundTruth(String),

    #[error(transparent)]
    Core(#[from] symconv::Error),
}

impl CliError {
    /// Process exit code; every failure class has its own.
    pub fn exit_code(&self) -> i32 {
        use symconv::Error as E;
        match self {
            CliError::Io { .. } => 3,
            CliError::Decode { .. } => 4,
            CliError::Config(_) => 5,
            CliError::MissingGroundTruth(_) => 6,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) => 10,
                E::DimensionMismatch { .. } => 11,
                E::NoSupport(_) => 12,
                E::EmptyDataset => 13,
                E::GroundTruth { .. } => 14,
                E::Io { .. } => 15,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
