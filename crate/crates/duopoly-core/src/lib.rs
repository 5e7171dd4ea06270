//! Diffusion of two competing brands in a common market.
//!
//! The macroscopic side is a coupled Bass system with cross-brand terms,
//! integrated with fixed-step RK4. Its only equilibria lie on the market
//! saturation line `n1 + n2 = 1`; the [`equilibrium`] module characterizes
//! that line (linearization coefficients, perturbation constants, and the
//! implicit within-brand equilibrium relation solved by safeguarded
//! Newton-Raphson). The microscopic side is an agent-based model on a
//! Watts-Strogatz network where agents pick among brand 1, brand 2 and
//! non-adoption through a zero-temperature three-option decision rule.
//! The [`fitting`] module ties the two together: Nelder-Mead fits of the
//! Bass parameters to ABM-generated adoption curves, with SSE, R^2 and
//! area-difference metrics.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod abm;
pub mod bass;
pub mod equilibrium;
mod error;
pub mod fitting;

pub use error::{Error, Result};
