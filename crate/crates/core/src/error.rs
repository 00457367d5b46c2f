use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller supplied an invalid argument (sizes, counts, ranges).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A variational factor degenerated to a point mass at zero.
    #[error("component collapse: {0}")]
    ComponentCollapse(String),

    /// Numerical procedure failed (non-PD matrix, non-convergent quadrature).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Estimator could not be initialised from the data.
    #[error("initialization failed: {0}")]
    Initialization(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
