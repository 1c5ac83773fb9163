use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A matrix that does not respect the relations of its domain or codomain,
    /// or a composition of incompatible maps.
    #[error("presentation error: {0}")]
    Presentation(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degree {degree} outside the declared range {lo}..={hi} of {name}")]
    OutOfRange {
        name: String,
        degree: i64,
        lo: i64,
        hi: i64,
    },

    #[error("contradiction at {window}: {message}")]
    Contradiction { window: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
