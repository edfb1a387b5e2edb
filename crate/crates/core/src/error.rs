use std::path::PathBuf;

use crate::dynamics::GapPropagator;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("gap closure violated: residual {sum:e} exceeds {tolerance:e}")]
    ClosureMismatch { sum: f64, tolerance: f64 },

    #[error("crossing of gap {gap} requested but z = {z:e} exceeds tolerance {tolerance:e}")]
    CrossingNotDue { gap: usize, z: f64, tolerance: f64 },

    #[error("root solver failed on gap {gap}: {reason} ({propagator:?})")]
    RootSolver {
        gap: usize,
        reason: &'static str,
        propagator: GapPropagator,
    },

    #[error("run failed at t = {time} after {events} events: {source}")]
    Run {
        time: f64,
        events: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
