use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("I/O error on {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("corrupt dataset: {bad} of {total} records malformed (limit {max_fraction})")]
    CorruptDataset {
        bad: usize,
        total: usize,
        max_fraction: f64,
    },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("brute-force oracle refuses {n} sequences (limit {limit})")]
    OracleGuard { n: usize, limit: usize },

    #[error("sequence dataset is empty")]
    EmptyDataset,

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("malformed {format} at line {line}: {reason}")]
    Format {
        format: &'static str,
        line: usize,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

/// Broad class of a failure, used by the command-line front end for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownMeasure(_) | Error::Config(_) => ErrorKind::Usage,
            Error::Io(_)
            | Error::File { .. }
            | Error::Csv(_)
            | Error::Json(_)
            | Error::CorruptDataset { .. }
            | Error::OracleGuard { .. }
            | Error::EmptyDataset
            | Error::UnknownNode(_)
            | Error::Format { .. }
            | Error::InvalidGraph(_) => ErrorKind::Data,
            Error::Stage { source, .. } => source.kind(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }
}
