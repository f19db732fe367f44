use alloc::string::String;
use core::fmt;

/// Identifies the channel input whose output state failed validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelInput {
    Pair { x: usize, y: usize },
    Symbol(usize),
}

impl fmt::Display for ChannelInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelInput::Pair { x, y } => write!(f, "({x},{y})"),
            ChannelInput::Symbol(u) => write!(f, "{u}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operator is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance")]
    NonHermitian { asymmetry: f64 },
    #[error("operator has eigenvalue {eigenvalue:e} below the positivity tolerance")]
    NegativeOperator { eigenvalue: f64 },
    #[error("invalid state: {reason}")]
    InvalidState { reason: String },
    #[error("invalid output state for input {input}: {reason}")]
    InvalidChannelOutput { input: ChannelInput, reason: String },
    #[error("invalid measurement: {reason}")]
    InvalidPovm { reason: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator list is empty")]
    EmptyList,
    #[error("alphabet mismatch for {what}: expected {expected}, found {found}")]
    AlphabetMismatch { what: &'static str, expected: usize, found: usize },
    #[error("word length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{what} needs {required}, budget allows {limit}")]
    BudgetExceeded { what: &'static str, required: usize, limit: usize },
    #[error("invalid distribution ({what}): {reason}")]
    InvalidDistribution { what: &'static str, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("conference step {step}: sender {sender} has no table entry for message {message} with history {history:?}")]
    TableIncomplete {
        step: usize,
        sender: u8,
        message: usize,
        history: alloc::vec::Vec<usize>,
    },
    #[error("code shape mismatch: expected (M, K, T) = {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },
}

pub type Result<T> = core::result::Result<T, Error>;
