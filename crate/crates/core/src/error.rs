use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("recurrence has no coefficients")]
    EmptyRecurrence,
    #[error("leading coefficient c_1 must be positive")]
    LeadingCoefficientZero,
    #[error("last coefficient c_L must be positive")]
    LastCoefficientZero,
    #[error("recurrence [1] is constant and has no legal decompositions beyond 1")]
    DegenerateRecurrence,
    #[error("cannot parse recurrence `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("index {index} is outside the materialized range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("zero has no decomposition")]
    ZeroValue,
    #[error("sequence table too short: need {needed} terms, have {have}")]
    TableTooShort { needed: usize, have: usize },
    #[error("malformed coefficient list: {0}")]
    Malformed(String),
    #[error("interval [G_{n}, G_{next}) has width {width}, above the enumeration cap {cap}", next = .n + 1)]
    IntervalTooLarge { n: usize, width: String, cap: u64 },

    #[error("recurrence has a zero coefficient; gap formulas need every c_i >= 1")]
    NotAllPositive,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("root validation failed for f = {f}: {reason}")]
    RootValidation { f: usize, reason: String },
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("longest-gap bound f = {f} must exceed j_L = {j_last}")]
    GapBound { f: usize, j_last: usize },
    #[error("fixed-point iteration for the smallest root does not contract at f = {0}")]
    NonContraction(usize),
    #[error("value exceeds the floating-point range: {0}")]
    Overflow(String),
    #[error("truncation window is degenerate: {0}")]
    DegenerateWindow(String),
    #[error("empty sample set")]
    EmptySamples,
}
