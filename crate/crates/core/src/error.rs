use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::time::Month;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: {malformed} of {records} records malformed; is the schema right?")]
    Schema {
        path: PathBuf,
        malformed: u64,
        records: u64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed data: {0}")]
    Data(String),

    #[error("month {month} has {n_t} documents, fewer than n_min = {n_min}")]
    UnderfullMonth { month: Month, n_t: u64, n_min: u64 },

    #[error("empty cohort: {0}")]
    EmptyCohort(String),

    #[error("power-law tail is degenerate: every tail duration equals d_min")]
    DegenerateTail,

    #[error("power-law tail has {n_tail} durations above d_min, need at least {required}")]
    InsufficientTail { n_tail: usize, required: usize },

    #[error("statistic failed on {failed} of {reps} bootstrap resamples")]
    UnstableStatistic { failed: usize, reps: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 2 config, 3 data, 4 statistics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. }
            | Error::Schema { .. }
            | Error::Data(_)
            | Error::UnderfullMonth { .. } => 3,
            Error::EmptyCohort(_)
            | Error::DegenerateTail
            | Error::InsufficientTail { .. }
            | Error::UnstableStatistic { .. } => 4,
        }
    }
}
