use thiserror::Error;

/// Errors raised by the analysis primitives.
///
/// Premise failures are not errors: predicates return `false` and the
/// certificate engine records the failed premise by name. Errors are reserved
/// for malformed input, violated preconditions and exhausted budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("empty word where a nonempty word is required")]
    EmptyWord,
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate letter `{0}` in alphabet")]
    DuplicateLetter(String),
    #[error("alphabets are limited to 256 letters (got {0})")]
    AlphabetTooLarge(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("directive sequence is not everywhere-growing")]
    NotEverywhereGrowing,
    #[error("directive sequence is not composable: {0}")]
    NotComposable(String),
    #[error("substitution is not left-proper (no common first letter)")]
    NotLeftProper,
    #[error("window too narrow: width {width}, need at least {needed}")]
    WindowTooNarrow { width: usize, needed: usize },
    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget { what: &'static str, needed: usize, cap: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("missing radius: {0}")]
    MissingRadius(String),
}

impl Error {
    /// True for resource-cap failures, which the CLI maps to a distinct exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
