use thiserror::Error;

/// Errors raised by the solvers and checkers in this crate.
///
/// The variants are grouped so that callers (notably the CLI) can map them
/// onto distinct exit codes: configuration problems, numerical failures, and
/// violations of a verified mathematical property.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    Config(String),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no decaying tail: {0}")]
    NoDecay(String),

    #[error("no shooting bracket found after {doublings} doublings (last slope {last})")]
    NoBracket { doublings: usize, last: f64 },

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("degenerate linear problem: {0}")]
    Degenerate(String),

    #[error("Morse index violation: found {negative} negative eigenvalue(s)")]
    MorseIndex { negative: usize },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("lemma violation ({lemma}): {detail}")]
    LemmaViolation { lemma: String, detail: String },

    #[error("no sign-change bracket: {0}")]
    NotFound(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn lemma(lemma: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::LemmaViolation {
            lemma: lemma.into(),
            detail: detail.into(),
        }
    }

    /// Coarse classification used for exit codes and FFI status values.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParams(_)
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Incompatible(_)
            | Error::Precondition(_)
            | Error::NoDecay(_) => ErrorKind::Validation,
            Error::NoBracket { .. }
            | Error::Convergence(_)
            | Error::OracleFailure(_)
            | Error::Degenerate(_)
            | Error::NotFound(_)
            | Error::Io(_) => ErrorKind::Solver,
            Error::MorseIndex { .. } | Error::Consistency(_) | Error::LemmaViolation { .. } => {
                ErrorKind::Violation
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Solver,
    Violation,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
