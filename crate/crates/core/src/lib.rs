//! A numerical laboratory for degenerate nonlinear diffusion
//! `u_t = a(u) Δu` with a coefficient vanishing at zero concentration.
//!
//! The crate has three legs:
//!
//! * [`coefficients`] — diffusion coefficient families, the tail integral
//!   `I(s) = ∫_s^∞ dτ/(τ a(τ))`, and numeric verdicts on the conditions
//!   separating finite from infinite propagation speed;
//! * [`pde`] — an explicit positivity-preserving finite-difference solver
//!   on intervals and radially symmetric balls, support-front detection,
//!   and a weak-form residual check, with [`oracles`] providing the exact
//!   self-similar and heat solutions it is tested against;
//! * [`weights`] and [`stability`] — the weight framework `(h, H, F)`,
//!   numeric checkers for its structural assumptions, Lyapunov
//!   functionals `Y(t) = ∫ H(u)^ν dx`, and the ordinary differential
//!   inequality machinery that turns them into decay envelopes.

// parameter guards are written `!(x > 0.0)` on purpose: the negated form
// rejects NaN, which `x <= 0.0` lets through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod error;
mod fit;
pub mod oracles;
pub mod pde;
pub mod quad;
pub mod stability;
pub mod weights;

pub use coefficients::{Coefficient, ConditionReport, Verdict, Witness};
pub use error::{Error, Result};
pub use pde::{Ball, FrontReport, FrontVerdict, Geometry, InitialData, Mesh, SolveOptions, Trajectory};
pub use stability::{DecayEnvelope, FunctionalSeries, OdiParams, RateMode};
pub use weights::{Assumption, CustomWeight, WeightPair};
