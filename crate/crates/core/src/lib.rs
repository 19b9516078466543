//! Ground states of the one-dimensional Liouville-Weyl fractional nonlinear
//! Schrödinger equation
//!
//! ```text
//!   tD^α_∞ ( -∞D^α_t u ) + V(t) u = f(u),   u ∈ H^α(ℝ),  1/2 < α < 1
//! ```
//!
//! computed on a periodic truncation of the line with Fourier pseudospectral
//! operators. The crate is organised bottom-up:
//!
//! * [`spectral`]: grid, transform convention and the fractional operators as
//!   Fourier multipliers.
//! * [`spaces`]: H^α and X^α norms, embedding diagnostics.
//! * [`problem`]: the nonlinearity `f` and potential `V` with hypothesis
//!   validators.
//! * [`energy`]: the action functional, its limit functional and gradient.
//! * [`nehari`]: fibering maps, Nehari projection and level comparisons.
//! * [`solver`]: Nehari-projected descent and the ground-state diagnostics.
//! * [`rearrange`]: discrete symmetric decreasing rearrangement.
//! * [`sampling`]: seeded random fields and start profiles.
//! * [`verify`]: named property suites used by the command line driver.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
mod error;
pub mod nehari;
pub mod problem;
pub mod rearrange;
pub mod sampling;
pub mod solver;
pub mod spaces;
pub mod spectral;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use problem::{Hypothesis, Nonlinearity, Potential, PotentialFlags, Problem};
pub use spectral::{Field, FractionalOrder, Grid};
