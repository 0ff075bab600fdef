use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("points are collinear")]
    CollinearPoints,

    #[error("degenerate point configuration for circle fit")]
    DegenerateConfiguration,

    #[error("theta lies outside (or on the boundary of) the region")]
    ThetaOutsideRegion,

    #[error("point is not on the region boundary (relative offset {0:e})")]
    PointNotOnBoundary(f64),

    #[error("no exit from region within {0} steps")]
    MaxStepsExceeded(usize),

    #[error("sample variance is not positive ({0})")]
    DegenerateVariance(f64),

    #[error("exit points are not on a common circle (rms residual {rms:e}, radius {radius})")]
    InconsistentExits { rms: f64, radius: f64 },

    #[error("circles of radius {radius} around the two exits do not intersect (distance {distance})")]
    NoIntersection { distance: f64, radius: f64 },

    #[error("log target is not finite at the initial point")]
    NonFiniteInit,

    #[error("step-size adaptation failed (acceptance rate {0:.3})")]
    AdaptationFailed(f64),

    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("diagnostics threshold breached: {0}")]
    Diagnostics(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Parse { .. } | Error::Io { .. } => 2,
            _ => 3,
        }
    }
}
