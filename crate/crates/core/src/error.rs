//! Error types shared across the laboratory.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction parameter violates its stated constraints.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An improper integral failed to stabilize; the tail decays too
    /// slowly. Carries the partial sum accumulated before giving up.
    #[error("integral diverges (partial sum {partial:.6e} after {segments} tail segments)")]
    Divergence { partial: f64, segments: u32 },

    /// The explicit scheme's stable step shrank below the floor.
    #[error("stiffness error: required dt {dt:.3e} below {floor:.0e} at t = {t:.6e}")]
    Stiffness { dt: f64, floor: f64, t: f64 },

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
