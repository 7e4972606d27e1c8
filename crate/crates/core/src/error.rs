use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {0}: modes per axis must be even and at least 4")]
    InvalidGrid(usize),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("mean vorticity is nonzero ({0:.3e}); no periodic velocity exists")]
    NonzeroMean(f64),

    #[error("field is not divergence-free: relative divergence {0:.3e}")]
    NotDivergenceFree(f64),

    #[error("blow-up at t = {time}: enstrophy {enstrophy:.6e}")]
    BlowUp { time: f64, enstrophy: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("picard iteration did not converge on slab {slab} after {iterations} iterations (last change {last_change:.3e}, ratios {ratios:?})")]
    PicardDiverged {
        slab: usize,
        iterations: usize,
        last_change: f64,
        ratios: Vec<f64>,
    },

    #[error("adaptive partition: {0}")]
    Partition(String),

    #[error("{0}")]
    Estimate(String),

    #[error("config {path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
