use thiserror::Error;

/// Errors raised by the permlab library.
///
/// Every size cap is reported with the offending value and the cap itself so
/// callers (the CLI in particular) can surface a precise message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension {n} out of range (allowed {min}..={max})")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },

    #[error("n = {n} is too large for {what} (cap n <= {cap})")]
    TooLarge { what: &'static str, n: usize, cap: usize },

    #[error("exact arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("row prefix is already full ({0} rows)")]
    PrefixFull(usize),

    #[error("row has length {got}, expected {expected}")]
    RowLength { expected: usize, got: usize },

    #[error("entry {0} is not a sign (expected -1 or +1)")]
    NotASign(i64),

    #[error("column set mask {mask:#x} has bits outside 0..{n}")]
    MaskOutOfRange { mask: u64, n: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("level {k} is not built (table complete through level {k_max})")]
    LevelNotBuilt { k: usize, k_max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no further rows to expose (all {0} rows are exposed)")]
    NoNextRow(usize),

    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
