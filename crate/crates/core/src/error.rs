use std::path::PathBuf;

use thiserror::Error;

use crate::signs::CombineError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Syntax {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("line {line}: feature `{feature}` is not declared")]
    UndeclaredFeature { line: usize, feature: String },

    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),

    #[error("invalid atom `{0}`: atoms are non-empty and contain no whitespace")]
    InvalidAtom(String),

    #[error(transparent)]
    Combine(#[from] CombineError),

    #[error("monotonicity violation: {0}")]
    Monotonicity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bracketing: {0}")]
    Bracketing(String),

    #[error("bag: {0}")]
    Bag(String),

    #[error("no lexicon entry covers source sign `{0}`")]
    Uncovered(String),

    #[error("source sign `{sign}` is covered by several lexicon entries (lines {lines:?})")]
    AmbiguousCoverage { sign: String, lines: Vec<usize> },

    #[error("lexicon line {0}: set-to-set entries are not supported")]
    UnsupportedEntry(usize),

    #[error("bag of {size} signs exceeds the oracle limit of {limit}")]
    OracleLimit { size: usize, limit: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn syntax(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for errors that signal a broken grammar assumption rather than
    /// bad input.
    pub fn is_assumption_violation(&self) -> bool {
        matches!(
            self,
            Error::Monotonicity(_) | Error::Combine(CombineError::PrecedenceViolation { .. })
        )
    }
}
