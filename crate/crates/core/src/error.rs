use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("unknown label '{value}' at line {line}")]
    UnknownLabel { value: String, line: usize },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown tag '{tag}'{hint}")]
    UnknownTag { tag: String, hint: String },

    #[error("unsupported model version {found} (expected {expected})")]
    UnsupportedModelVersion { found: String, expected: u32 },

    #[error("model parse error at byte offset {offset}: {message}")]
    ModelParse { offset: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Degenerate(String),

    #[error("uid '{uid}': {message}")]
    Pair { uid: String, message: String },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse error classes, used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Validation,
    Internal,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Config(_) | Error::UnknownTag { .. } => ErrorKind::Usage,
            Error::MalformedLine { .. }
            | Error::UnknownLabel { .. }
            | Error::Validation(_)
            | Error::UnsupportedModelVersion { .. }
            | Error::ModelParse { .. }
            | Error::Degenerate(_)
            | Error::Pair { .. }
            | Error::Csv(_) => ErrorKind::Validation,
            Error::Json(_) => ErrorKind::Validation,
        }
    }
}
