use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the analysis pipeline.
///
/// Variants fall into three families (see [`Error::kind`]): invalid parameters,
/// problems with the input data, and numerical failures of an estimator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("no records")]
    NoRecords,

    #[error("no day survives the filter of {min_ticks} ticks per day")]
    NoRetainedDays { min_ticks: usize },

    #[error("series too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error(
        "segment {segment}{} has zero variance; q={q} < 0 is undefined",
        scale.map(|s| format!(" at scale s={s}")).unwrap_or_default()
    )]
    ZeroSegmentVariance { scale: Option<usize>, segment: usize, q: f64 },

    #[error("only {got} scale points inside fit window [{lo}, {hi}], need at least 3")]
    InsufficientFitPoints { lo: usize, hi: usize, got: usize },

    #[error("non-finite value in fit: {0}")]
    NonFinite(String),

    #[error("q grid is not uniform: {0}")]
    NonUniformGrid(String),

    #[error("shuffle replicate with seed {seed} failed: {source}")]
    Replicate {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

/// Broad classification of an [`Error`], used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) | Error::NonUniformGrid(_) => ErrorKind::Usage,
            Error::Open { .. }
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Malformed { .. }
            | Error::NoRecords
            | Error::NoRetainedDays { .. }
            | Error::TooShort { .. } => ErrorKind::Data,
            Error::ZeroVariance(_)
            | Error::ZeroSegmentVariance { .. }
            | Error::InsufficientFitPoints { .. }
            | Error::NonFinite(_) => ErrorKind::Numeric,
            Error::Replicate { source, .. } => source.kind(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
