use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("data and guess sets overlap at index {0}")]
    Overlap(i64),

    #[error("guess set is empty")]
    EmptyGuessSet,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: usize },

    #[error("operation needs a finite alphabet: {0}")]
    UnboundedAlphabet(String),

    #[error("enumeration budget exceeded: {states} states > {budget}")]
    BudgetExceeded { states: u128, budget: u64 },

    #[error("no unique stationary distribution: {0}")]
    NonErgodic(String),

    #[error("no analytic variation bound available for {0} models")]
    NoVariationBound(&'static str),

    #[error("no training windows: sample shorter than the pattern span")]
    NoTrainingWindows,

    #[error("pattern support mismatch: expected {expected} symbols, got {got}")]
    SupportMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Q has zero mass at symbol {0} where P is positive")]
    NotAbsolutelyContinuous(usize),

    #[error("assumption not verifiable: {0}")]
    Divergent(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("experiment incomplete: {0}")]
    Incomplete(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::NonErgodic(_) | Error::BudgetExceeded { .. } | Error::Incomplete(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
