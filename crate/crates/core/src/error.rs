use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distribution has no symbols")]
    EmptyDistribution,

    #[error("negative probability {value} at symbol {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("non-finite value {value} at symbol {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("distribution does not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid order {0}: must be a finite non-negative number")]
    InvalidOrder(f64),

    #[error("invalid base {0}: must be an integer in 2..={max}", max = crate::entropy::LogBase::MAX)]
    InvalidBase(u32),

    #[error("argument {0} is outside the domain of the q-deformed function")]
    DomainError(f64),

    #[error("cardinality mismatch: distribution has {expected} symbols, got {found}")]
    CardinalityMismatch { expected: usize, found: usize },

    #[error("invalid codeword length {value} at symbol {index}")]
    InvalidLength { index: usize, value: f64 },

    #[error("symbol {index} has zero probability and no finite ideal length")]
    ZeroProbability { index: usize },

    #[error("lengths violate the Kraft-McMillan inequality (sum = {sum})")]
    KraftViolation { sum: f64 },

    #[error("length {value} at symbol {index} is not an integer")]
    NonIntegerLength { index: usize, value: f64 },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("codeword {index} is empty")]
    EmptyCodeword { index: usize },

    #[error("codeword {index} contains digit {digit} outside alphabet of size {alphabet_size}")]
    InvalidDigit {
        index: usize,
        digit: u32,
        alphabet_size: u32,
    },

    #[error("codebook is not prefix-free: codeword {prefix} is a prefix of codeword {other}")]
    NonPrefixCodebook { prefix: usize, other: usize },

    #[error("symbol {0} has no codeword")]
    UnknownSymbol(usize),

    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("payload exhausted mid-codeword after {decoded} of {expected} symbols")]
    DanglingBits { decoded: u64, expected: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
