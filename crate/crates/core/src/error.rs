use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An experiment configuration cannot be satisfied.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("matrix is not positive semi-definite: min eigenvalue {min_eigenvalue:e} below -{tolerance:e} * max eigenvalue {max_eigenvalue:e}")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("NMSE undefined: every row of the true channel is zero")]
    UndefinedMetric,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
