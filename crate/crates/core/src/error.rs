use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord { path: String, line: usize, message: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("mixed payload kinds (line {line})")]
    MixedPayloadKinds { line: usize },
    #[error("duplicate id `{id}` (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("vector dimensionality mismatch: expected {expected}, got {found} (line {line})")]
    DimensionMismatch { expected: usize, found: usize, line: usize },
    #[error("payload kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("degenerate payload: self-similarity is zero")]
    DegeneratePayload,
    #[error("invalid configuration field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
    #[error("trivial split: z must contain both 0 and 1")]
    TrivialSplit,
    #[error("reference subset too small: need at least 2 points, got {0}")]
    SubsetTooSmall(usize),
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("all-zero counts")]
    EmptyCounts,
    #[error("no labeled points")]
    NoLabels,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("dataset must contain at least one TRAIN and one TEST point")]
    MissingSplit,
    #[error("cannot sample {requested} points from {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("ensemble has {available} columns, need at least {required}")]
    TooFewColumns { required: usize, available: usize },
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("reference id `{0}` does not resolve in the model's reference pool")]
    UnresolvedReference(String),
    #[error("no overlapping ids between predictions and gold")]
    EmptyIntersection,
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for usage and validation problems, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
