//! Third-order quasi-compact finite-difference schemes for space tempered
//! fractional diffusion equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`calculus`] generates the Grünwald and quasi-compact weights and holds
//!   quadrature-based reference evaluators for tempered operators.
//! * [`operators`] assembles the compact matrix `B`, the spatial matrix `P`
//!   and the per-step boundary vector `H` on uniform grids.
//! * [`spectral`] turns the stability argument into executable checks.
//! * [`solver1d`] and [`solver2d`] step the implicit schemes in time.
//! * [`verification`] holds manufactured solutions and convergence studies.

// NaN must fail validation, hence `!(x > 0.0)`; quadrature nodes are quoted
// at their published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod calculus;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod params;
pub mod report;
pub mod solver1d;
pub mod solver2d;
pub mod spectral;
pub mod verification;

pub use error::{Error, Result};
pub use grid::{Grid1D, TimeGrid};
pub use params::{Side, TemperedParams};
