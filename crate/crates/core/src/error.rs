use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("kill region undefined for identical angles ({0} rad)")]
    IdenticalAngles(f64),

    #[error("polygon needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("unknown angle {0} rad")]
    UnknownAngle(f64),

    #[error("no-parallel-line assumption violated: {0}")]
    NoParallelLine(String),

    #[error("simulation may not terminate: {0}")]
    MayNotTerminate(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("quadrature did not reach tolerance (error estimate {estimate:e}, tolerance {tolerance:e})")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("inconsistent event log at event {index}: {reason}")]
    InconsistentEventLog { index: usize, reason: String },

    #[error("empty core window")]
    EmptyWindow,

    #[error("persistent degeneracy in stable intersection after {0} offsets")]
    Degenerate(usize),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
