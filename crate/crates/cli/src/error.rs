use thiserror::Error;

pub const EXIT_IO: i32 = 2;
pub const EXIT_ID_MISMATCH: i32 = 3;
pub const EXIT_BAD_ARGS: i32 = 4;
pub const EXIT_MISSING_PREREQUISITE: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] capkit::Error),
    #[error("video ids do not match: {0}")]
    IdMismatch(String),
    #[error("invalid arguments: {0}")]
    BadArgs(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("cannot write report: {0}")]
    Report(#[from] serde_json::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(capkit::Error::Io(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use capkit::Error as E;
        match self {
            CliError::IdMismatch(_) => EXIT_ID_MISMATCH,
            CliError::BadArgs(_) => EXIT_BAD_ARGS,
            CliError::MissingPrerequisite(_) => EXIT_MISSING_PREREQUISITE,
            CliError::Report(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::MissingReference(_) | E::VideoIdMismatch(_) => EXIT_ID_MISMATCH,
                E::NonPositiveDuration(_)
                | E::InvalidArgument(_)
                | E::EmptyFeatureList
                | E::EmptyCandidateSet
                | E::EmptyPool
                | E::EmptyDataset
                | E::EmptyBatch => EXIT_BAD_ARGS,
                _ => EXIT_IO,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
