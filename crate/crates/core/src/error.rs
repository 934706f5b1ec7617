use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("test-modes-too-few: k = {k} must exceed 2 ln(2/eps) = {required:.6}")]
    TestModesTooFew { k: u64, required: f64 },

    #[error("definetti-inapplicable: n - 5 = {n_minus_5} is below N*(alpha = {alpha:.6}) = {n_star}")]
    DeFinettiInapplicable { n_minus_5: u64, alpha: f64, n_star: u64 },

    #[error("ill-conditioned-gram: condition number {condition:.3e} exceeds {limit:.1e}")]
    IllConditionedGram { condition: f64, limit: f64 },

    #[error("resource guard: estimated {estimate} basis states exceeds limit {limit}")]
    ResourceGuard { estimate: u128, limit: u128 },

    #[error("tail-too-large: truncation tail mass {tail:.3e} exceeds {limit:.1e}")]
    TailTooLarge { tail: f64, limit: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unachievable: no block length up to 2^60 reaches the target")]
    Unachievable,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
