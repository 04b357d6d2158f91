//! Cahn-Hilliard-Navier-Stokes (model H) simulation on a periodic channel with
//! time-dependent tangential wall velocity.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod initial;
pub mod lifting;
pub mod mms;
pub mod norms;
pub mod ops;
pub mod potential;
pub mod solver;
pub mod spectral;
pub mod stokes;

pub use error::{ChnsError, Result};
pub use grid::{Grid, ScalarField, VectorField, WallTrace};
