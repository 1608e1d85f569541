use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input: wrong dimension, unknown class id, out-of-range value.
    #[error("input error: {0}")]
    Input(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("integrity error for {dataset}: expected {field} = {expected}, found {actual}")]
    Integrity {
        dataset: String,
        field: &'static str,
        expected: String,
        actual: String,
    },

    #[error("training error: {0}")]
    Training(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("missing dataset {id}: expected {path} (manifest: {entry})")]
    MissingDataset {
        id: String,
        path: PathBuf,
        entry: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
