use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A non-finite value reached an operation that needs a real number.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value outside the operation's domain (u outside (0,1), n < 2, x < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at position {position}: {reason}")]
    Parse { position: usize, reason: String },

    /// Data that makes a fit or ratio meaningless, such as a zero probability in a log-log fit.
    #[error("numeric degeneracy: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(position: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            position,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Domain(_) | Error::InvalidInput(_) => 3,
            Error::Degenerate(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
