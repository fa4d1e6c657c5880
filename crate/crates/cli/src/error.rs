use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] hollowgram_core::Error),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("dataset file: magic mismatch")]
    BadMagic,
    #[error("dataset file: truncated")]
    Truncated,
    #[error("dataset file: header: {0}")]
    HeaderParse(String),
    #[error("dataset file: {0}")]
    DatasetValidation(String),
    #[error(
        "checkpoint: spec hash mismatch (checkpoint {found:#018x}, expected {expected:#018x})"
    )]
    SpecHashMismatch { expected: u64, found: u64 },
    #[error("checkpoint: line {line}: {message}")]
    CorruptCheckpoint { line: usize, message: String },
    #[error("grid results have different specs")]
    SpecMismatch,
    #[error("csv: line {line}: {message}")]
    CsvParse { line: usize, message: String },
    #[error("{0}")]
    Other(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
