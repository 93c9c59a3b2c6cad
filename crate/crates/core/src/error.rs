//! Crate error type.

use thiserror::Error;

/// Errors produced by oracle construction, searches and norm computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Every scheduled probe step hit an infinite function value.
    #[error("function is not finite near the requested point: {0}")]
    NonFiniteNearPoint(String),

    /// Difference quotients failed to stabilise before the step floor.
    #[error("difference quotients did not stabilise before the epsilon floor (last delta {last_delta:e})")]
    PrecisionLoss { last_delta: f64 },

    /// Mixed ambient dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Support approximations built over different direction sets.
    #[error("support approximations use different direction sets")]
    DirectionSetMismatch,

    /// Support values are inconsistent with any compact convex set.
    #[error("support values are inconsistent beyond tolerance (gap {gap:e})")]
    HullDegenerate { gap: f64 },

    /// Vector fields indexed over different atom sets.
    #[error("atom mismatch: {0}")]
    AtomMismatch(String),

    /// Convolution support requires a field value that was not provided.
    #[error("field does not cover required atom {0}")]
    SupportNotCovered(String),

    /// Multiplicative-closure pair set for a Young property check is empty.
    #[error("grid is not multiplicatively closed: no testable (r, s, rs) triples")]
    GridNotClosed,

    /// Dual exponent bounds need `p_minus > 1`.
    #[error("p_minus = {0} <= 1: the conjugate may vanish near zero, growth exponents are undefined")]
    PMinusNotGreaterThanOne(f64),

    /// Profile failed Young-function validation.
    #[error("profile is not a valid Young function: {0}")]
    InvalidProfile(String),

    /// Expression parse error with byte offset and expected-token set.
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    /// Unknown function identifier in a profile expression.
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },

    /// Wrong argument count for a profile function.
    #[error("`{func}` takes {expected} argument(s), got {got} (at byte {offset})")]
    Arity {
        offset: usize,
        func: String,
        expected: usize,
        got: usize,
    },

    /// Oracle construction probe failed.
    #[error("oracle construction failed: {0}")]
    OracleConstruction(String),

    /// Extended-real arithmetic rejected an operation (e.g. `0 * inf`).
    #[error("invalid extended-real operation: {0}")]
    ExtReal(String),

    /// Precondition violation not covered by a more specific variant.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
