//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The input tuple violates an invariant (element < 2, gcd ≠ 1, too short).
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    /// An argument is outside an operation's domain (e.g. λ ∈ {0,1}).
    #[error("{0}")]
    Domain(String),

    /// A closed-form family was asked to run outside its stated hypotheses.
    /// The message names the failed constraint.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A desk-scale bound was exceeded (oracle enumeration cap, exponent size).
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    /// An exactness or cancellation assertion failed. This signals a bug in an
    /// engine, never bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    /// Every scanned value of the reduction parameter was infeasible; the
    /// caller should raise the cap.
    #[error("no feasible value with m <= {0}: raise the m cap")]
    Unresolved(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
