use std::fmt;

/// Location of a parse failure, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} {index} out of range 1..={max}")]
    Range {
        what: &'static str,
        index: usize,
        max: usize,
    },
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown gate `{0}`")]
    Dispatch(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parameter-shift rule not applicable: {0}")]
    UnsupportedForShift(String),
    #[error("cannot renormalize: outcome has probability {0:e}")]
    Renormalization(f64),
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("parse error at {span}: {message}")]
    Parse { span: Span, message: String },
    #[error("qubit {qubit} out of range 1..={nqubits} at {span}")]
    ScriptRange {
        span: Span,
        qubit: usize,
        nqubits: usize,
    },
    #[error("{message} at {span}")]
    ScriptValidation { span: Span, message: String },
    #[error("cannot serialize: {0}")]
    Serialization(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Source position for script errors, if any.
    pub fn span(&self) -> Option<Span> {
        match self {
            Error::Parse { span, .. }
            | Error::ScriptRange { span, .. }
            | Error::ScriptValidation { span, .. } => Some(*span),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
