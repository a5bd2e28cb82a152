//! Pseudo-spectral solvers for the scaled Boussinesq equations and the stratified
//! primitive equations on `[0,2π)² × [−1,1)`, plus a harness that measures how fast
//! the two converge as the aspect ratio τ goes to zero.

// grid loops index several wavenumber tables at once; `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod boussinesq;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod harness;
pub mod integrator;
pub mod pe;
pub mod spectral;

pub use error::{Error, Result};
