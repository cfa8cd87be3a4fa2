use num_rational::BigRational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed spec {text:?}: {reason}")]
    MalformedSpec { text: String, reason: String },
    #[error("entries of e and f must be >= 1")]
    ZeroEntry,
    #[error("e and f must both be nonempty")]
    EmptySequence,
    #[error("unbalanced spec: |e| = {e_sum} but |f| = {f_sum}")]
    Unbalanced { e_sum: u64, f_sum: u64 },
    #[error("L = {l} outside 1..={m}")]
    LOutOfRange { l: u64, m: u64 },
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series must have constant term 1")]
    ConstantTermNotOne,
    #[error("root exponent must be positive")]
    ZeroRoot,
    #[error("series is identically 1 up to order {order}; root exponent unbounded at this order")]
    UnboundedExponent { order: usize },
    #[error("series has a non-integral coefficient at index {index}")]
    NotIntegral { index: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("Landau function vanishes at {witness} inside [1/M, 1); case (i) fails")]
    CaseIFails { witness: BigRational },
    #[error("Landau function is negative at {witness}; factorial ratio is not integral")]
    NotLandauIntegral { witness: BigRational },
    #[error("theta = {theta} does not divide M = {m}")]
    ThetaNotDivisor { theta: u64, m: u64 },
    #[error("spec does not have the shape {expected}")]
    ShapeMismatch { expected: &'static str },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Zhou instance {ks:?} does not classify as case (i)")]
    ZhouAnomaly { ks: Vec<u64> },
    #[error("{what} = {value} exceeds the configured limit {limit}")]
    LimitExceeded { what: &'static str, value: u64, limit: u64 },
}
