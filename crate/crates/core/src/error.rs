use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an edge list, label file or embedding file could not be parsed.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Parameters that cannot be satisfied (k too large, bad bounds, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs that are individually valid but do not fit together.
    #[error("input error: {0}")]
    Input(String),

    /// More noise edges requested than there are absent node pairs.
    #[error("cannot add {requested} edges: only {available} node pairs are absent")]
    Capacity { requested: usize, available: usize },

    /// NaN or infinity escaped a numerical routine.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
