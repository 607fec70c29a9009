use std::path::PathBuf;

use crate::ArmId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("horizon {horizon} too short for n = {n}, k = {k}: {reason}")]
    HorizonTooShort {
        n: usize,
        k: usize,
        horizon: usize,
        reason: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("unknown arm id {arm} (arm count {arm_count})")]
    UnknownArm { arm: ArmId, arm_count: usize },

    #[error("cannot sample {requested} arms from {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("phase incomplete: candidate {arm} has {plays} plays, expected {expected}")]
    PhaseIncomplete {
        arm: ArmId,
        plays: usize,
        expected: usize,
    },

    #[error("combinatorial budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("environment has no exact expected-value oracle")]
    InexactOracle,

    #[error("series length mismatch: {expected} vs {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attaches a file path to an error raised while reading that file.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
