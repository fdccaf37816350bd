use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes. The CLI maps them onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Io,
    Config,
    Data,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid neighbor count k={k} for n={n} (need 1 <= k <= n)")]
    InvalidK { k: usize, n: usize },

    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),

    #[error("confidence delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    #[error(
        "k-NN radius is zero at point {index}: at least k exact duplicates \
         (run validation or add noise with --jitter)"
    )]
    ZeroRadius { index: usize },

    #[error("node {0} is not active")]
    InactiveNode(usize),

    #[error("node {0} is already active")]
    DuplicateNode(usize),

    #[error("node index {index} out of range for capacity {capacity}")]
    NodeOutOfRange { index: usize, capacity: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("no modal-set estimates to assign to")]
    NoEstimates,

    #[error("point set is empty")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("label length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Io { .. } => ErrorCategory::Io,
            Error::InvalidK { .. }
            | Error::InvalidDimension(_)
            | Error::InvalidDelta(_)
            | Error::InvalidConfig(_)
            | Error::InvalidSpec(_) => ErrorCategory::Config,
            _ => ErrorCategory::Data,
        }
    }
}
