use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cyclic factor order {0} is invalid (every order must be >= 2)")]
    InvalidOrder(u64),

    #[error("element index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("element {0} does not belong to the group")]
    ForeignElement(String),

    #[error("parse error at `{token}`: expected {expected}")]
    Parse { token: String, expected: String },

    #[error("invalid weight set: {0}")]
    InvalidWeights(String),

    #[error("element is not a term of the sequence")]
    AbsentTerm,

    #[error("operation requires a group of odd order (got order {0})")]
    EvenOrder(usize),

    #[error("sequence length {length} exceeds the limit {limit}; {hint}")]
    LengthLimit {
        length: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("dynamic program exceeded {limit} distinct achievable-set states; shrink the instance")]
    StateLimit { limit: usize },

    #[error("search budget of {budget} nodes exhausted before the result was exact")]
    BudgetExhausted { budget: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("catalog error: {0}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(token: impl Into<String>, expected: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            expected: expected.into(),
        }
    }
}
