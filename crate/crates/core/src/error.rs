use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column is empty")]
    EmptyColumn,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("code {code} out of range for cardinality {cardinality}")]
    CodeOutOfRange { code: u32, cardinality: u32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("feature {feature} is missing in every row and cannot be imputed")]
    UnimputableColumn { feature: usize },

    #[error("dataset still has missing cells; impute first")]
    MissingValues,

    #[error("no features to classify on")]
    NoFeatures,

    #[error("accuracy is undefined for an empty confusion matrix")]
    UndefinedAccuracy,

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
