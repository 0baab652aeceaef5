//! Pseudospectral laboratory for the defocusing generalized Benjamin-Ono
//! equation on a large torus.
//!
//! The crate provides a periodic spectral toolkit (Hilbert transform,
//! fractional derivatives, the linear dispersive propagator, dealiased
//! products), a fourth-order stiff integrator for
//! `u_t + H u_xx + (u^{k+1})_x = 0`, and a set of verification suites:
//! conserved-quantity diagnostics, virial/monotonicity functionals, a
//! localized interaction functional with its error budget, Littlewood-Paley
//! space-time norms with a paraproduct split of the nonlinearity, and a
//! sphere-constrained optimizer certifying positivity of the cross term
//! in the virial inequality.
//!
//! See the `examples/` directory for one runnable program per capability
//! and the `gbo-lab` binary for batch orchestration.

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod local_mono;
pub mod lp;
pub mod positivity;
pub mod runner;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};
pub use field::{Multiplier, Parity, SpectralField};
pub use grid::TorusGrid;

/// Critical Sobolev index `1/2 - 1/k` preserved by the scaling of the equation.
pub fn critical_index(k: u32) -> f64 {
    0.5 - 1.0 / k as f64
}
