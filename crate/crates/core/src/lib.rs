//! Stochastic Allen-Cahn equation with mollified additive noise.
//!
//! The crate couples four solvers on one shared Brownian path:
//!
//! - [`noise`]: two-sided Brownian paths and the mollified noise `xi^eps`;
//! - [`wave`]: perturbed traveling waves `(m(., delta), c(delta))` and `c0`;
//! - [`allen_cahn`]: the phase-field equation on a rectangle or in radial
//!   coordinates, interface extraction and L2 distance to step functions;
//! - [`flow`]: the limiting interface dynamics (resolvent `g(A, q)`, the
//!   radial signed-distance system and the radius SDE);
//!
//! and [`harness`] runs the pathwise convergence experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allen_cahn;
pub mod error;
pub mod fit;
pub mod flow;
pub mod harness;
pub mod noise;
pub mod potential;
pub mod quad;
pub mod tridiag;
pub mod wave;

pub use error::{Error, Result};
