use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("integer overflow in group arithmetic")]
    Overflow,

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("base {base} is below the admissible minimum {min}")]
    InvalidBase { base: i64, min: i64 },

    #[error("digit vectors need at least one digit")]
    EmptyDigitVector,

    #[error("digit {digit} outside 0..{base}")]
    DigitOutOfRange { digit: i64, base: i64 },

    #[error("{value} is not representable with {n} base-{base} digits")]
    OutOfRange { value: i64, base: i64, n: usize },

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("malformed chain problem: {0}")]
    MalformedProblem(String),

    #[error("enumeration of {needed} items exceeds the cap of {cap}")]
    EnumerationCapExceeded { needed: String, cap: u64 },

    #[error("label set {index} is empty while X is not")]
    EmptyLabelSet { index: usize },

    #[error("the difference map (a, b) -> a - b is not injective on G")]
    NotDifferenceInjective,

    #[error("no preimage: {0}")]
    NoPreimage(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(i64),

    #[error("invalid digit pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid search spec: {0}")]
    InvalidSearchSpec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
