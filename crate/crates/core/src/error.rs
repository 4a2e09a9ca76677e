use thiserror::Error;

/// Errors surfaced by the simulator and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition. The message names
    /// the offending field or argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pair half was measured twice on the same side.
    #[error("pair side {0} already collapsed")]
    AlreadyCollapsed(&'static str),

    /// Underlying I/O failure (config or result files).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
