use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("no references supplied")]
    NoReferences,
    #[error("no hypotheses supplied")]
    MissingInput,
    #[error("no reference for video `{0}`")]
    MissingReference(String),

    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("feature list is empty")]
    EmptyFeatureList,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("models disagree on vocabulary")]
    VocabMismatch,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("video id sets differ: {0}")]
    VideoIdMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("batch is empty")]
    EmptyBatch,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}:{line}: duplicate video id `{id}`")]
    DuplicateVideoId {
        path: PathBuf,
        line: usize,
        id: String,
    },
    #[error("{0}: bad magic, expected CFF1")]
    BadMagic(PathBuf),
    #[error("{path}: truncated file, expected {expected} bytes, found {found}")]
    TruncatedFile {
        path: PathBuf,
        expected: u64,
        found: u64,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("{path}:{line}: distribution sums to {sum}")]
    DistributionNotNormalized {
        path: PathBuf,
        line: usize,
        sum: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
