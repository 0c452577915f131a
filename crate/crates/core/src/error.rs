use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("line {line}: non-positive price {price}")]
    NonPositivePrice { line: u64, price: f64 },
    #[error("line {line}: date {date} does not follow {previous}")]
    NonIncreasingDate {
        line: u64,
        date: String,
        previous: String,
    },
    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate data: sample diffusion variance is zero")]
    Degenerate,
    #[error("empty chain")]
    EmptyChain,
    #[error("zero variance series")]
    ZeroVariance,
    #[error("zero mean")]
    ZeroMean,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
