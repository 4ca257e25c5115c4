use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed IDX data: {0}")]
    Format(String),

    #[error("dataset is empty: {0}")]
    EmptyDataset(String),

    #[error("covariance rank {rank} is below the requested {requested} components")]
    RankDeficient { rank: usize, requested: usize },

    #[error("cannot amplitude-encode: {0}")]
    Encoding(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("learner {index}: {source}")]
    Learner {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot compute voting weight: {0}")]
    Weighting(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
