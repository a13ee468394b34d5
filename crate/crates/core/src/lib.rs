//! Numerical toolkit for weighted nonlinear potential theory at a point.
//!
//! Given a volume-growth model `ρ ↦ μ(B_ρ)` (an abstract growth function or
//! a radial weight on `ℝⁿ`), the crate
//!
//! * computes annulus `p`-capacities by the integral estimate, the exact
//!   radial formula, the dyadic chaining bound, a discretized variational
//!   minimization and a Hölder interpolation lower bound ([`capacity`]);
//! * evaluates radial `p`-harmonic Green profiles, their gradients and
//!   their `L^τ` / `L^t` norms ([`green`]);
//! * reports the pointwise exponent endpoints and critical exponents
//!   ([`exponents`]);
//! * classifies singleton capacity, parabolicity, boundedness and
//!   integrability of Green functions ([`classify`]).
//!
//! Exact closed forms for radial weights act as oracles for the estimators.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod capacity;
pub mod classify;
pub mod cli;
pub mod error;
pub mod examples;
pub mod exponents;
pub mod green;
pub mod measures;
pub mod quad;
mod serde_ext;

pub use error::{Error, Result};
pub use measures::{AssumptionProfile, GrowthFunction, Model, ModelSpec, RadialMeasure};
