use thiserror::Error;

/// Errors raised while building or validating storage types and automata.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StorageError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("alphabet must contain the bottom symbol `_`")]
    MissingBottom,
    #[error("alphabet has {0} symbols, more than supported")]
    AlphabetTooLarge(usize),
    #[error("storage type has {0} tests; at most 64 are supported")]
    TooManyTests(usize),
    #[error("test `{0}` is not a test of this storage type")]
    IllTypedTest(String),
    #[error("operation `{0}` is not an operation of this storage type")]
    IllTypedOp(String),
    #[error("configuration does not match its storage type")]
    IllTypedConfig,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("missing `{0}` declaration")]
    MissingDeclaration(&'static str),
    #[error("conflicting values for test `{0}`")]
    ConflictingTest(String),
}

impl StorageError {
    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        StorageError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
