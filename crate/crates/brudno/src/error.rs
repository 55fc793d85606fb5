//! Error taxonomy shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong constructing or evaluating the objects in
/// this crate. Variants mirror the failure classes of the public operations:
/// malformed inputs, configured resource caps, and mathematical
/// preconditions (positivity, normalization, faithfulness) that were checked
/// and found violated.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Arguments outside an operation's domain (wrong alphabet, bad index,
    /// mismatched dimensions, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured cap would be exceeded (block enumeration, dense
    /// dimension, materialization bound, ...). Caps exist so desk-scale
    /// experiments fail loudly instead of thrashing.
    #[error("resource limit: {what} requires {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// A probability, weight, eigenvalue or trace that must be (strictly)
    /// positive or sub-normalized is not.
    #[error("positivity violation: {0}")]
    Positivity(String),

    /// A density/semi-density matrix failed a structural check
    /// (Hermiticity, trace, faithfulness, compatibility).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A weighted family failed validation (weights, rank, coverage).
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// A quasi-increasing sequence failed its ordering or trace
    /// monotonicity requirement.
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    /// A typical index set came out empty, so no projection can be sampled.
    #[error("degenerate typicality: {0}")]
    DegenerateTypicality(String),

    /// Well-formed request for something deliberately out of scope.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
