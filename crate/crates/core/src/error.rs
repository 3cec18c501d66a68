use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the detection and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    /// The along-line vote histogram carries no detectable rise/fall pair.
    #[error("no detectable support: {0}")]
    NoSupport(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{path}: row {row}: {message}")]
    GroundTruth {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
