//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by stream validation, bucket arithmetic and the
/// instance generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Numerator exceeds denominator; the value would be greater than one.
    #[error("not a probability: {numer}/{denom} > 1")]
    NotAProbability { numer: String, denom: String },

    /// Denominator is zero.
    #[error("zero denominator")]
    ZeroDenominator,

    /// Approximation ratio outside the range accepted by the algorithm.
    #[error("epsilon {0} outside (0, 1/2]")]
    EpsilonOutOfRange(String),

    /// Bucket base must lie strictly between zero and one.
    #[error("bucket base {0} outside (0, 1)")]
    BaseOutOfRange(String),

    /// Zero belongs to no bucket; callers must handle it separately.
    #[error("zero has no bucket index")]
    ZeroHasNoBucket,

    /// Value above one belongs to no bucket.
    #[error("value {0} above 1 has no bucket index")]
    ValueAboveOne(String),

    /// An exact power was refused because the result would be too large.
    #[error("exact power of {bits} bits exceeds the {cap}-bit cap; use decimal rendering")]
    ExactBlowUp { bits: u64, cap: u64 },

    /// More elements were pushed than the declared maximum stream length.
    #[error("stream overflow: already consumed the declared maximum of {n} elements")]
    StreamOverflow { n: u64 },

    /// An element's bit size exceeds the declared per-element budget.
    #[error("oversized element: bit size {got} exceeds the declared budget {limit}")]
    OversizedElement { got: u64, limit: u64 },

    /// Amplifier copy counts must be odd so the median/majority is unambiguous.
    #[error("amplifier needs an odd number of copies, got {0}")]
    EvenCopies(usize),

    /// A threshold decision was requested before any threshold was supplied.
    #[error("no threshold supplied (expected as the first stream element or an explicit option)")]
    MissingThreshold,

    /// Generator or protocol input outside its admissible range.
    #[error("index out of range: {what} = {got}, admissible {bound}")]
    IndexOutOfRange {
        what: &'static str,
        got: String,
        bound: String,
    },

    /// A generator precondition failed; the violated inequality is reported.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Exhaustive enumeration was requested for a family above the cap.
    #[error("family of {size} words exceeds the enumeration cap {cap}")]
    EnumerationCap { size: String, cap: u64 },

    /// Unsupported parameter combination.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A serialized state could not be decoded.
    #[error("malformed serialized state: {0}")]
    MalformedState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
