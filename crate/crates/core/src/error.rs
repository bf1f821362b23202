use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("line {line}, column {column}: {kind}")]
    Parse {
        line: usize,
        column: usize,
        kind: ParseErrorKind,
    },

    /// The requested accuracy `2^-requested` is not certified; `bound` is the
    /// best error bound that could be established.
    #[error("precision 2^-{requested} not reachable in double arithmetic (error bound {bound:e})")]
    Precision { requested: u32, bound: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),

    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("inline matrix is not unitary")]
    NonUnitary,
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, column, kind }
    }

    pub(crate) fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }
}
