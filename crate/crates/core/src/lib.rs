//! Numerical renormalization of golden-mean semi-Siegel Hénon maps.
//!
//! The crate builds the renormalization tower of a dissipative Hénon map
//! with a neutral fixed point of golden-mean rotation number, compares it
//! with the one-dimensional renormalization fixed point, and probes the
//! geometry of the Siegel boundary through the tower.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod arithmetic;
pub mod cache;
pub mod cheb;
mod ddmath;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod linearize;
pub mod maps;
pub mod renorm;
pub mod scalar;
pub mod universality;

pub use error::{Error, Result};
pub use maps::{HenonParams, QuadParams};
pub use renorm::{Pyramid, PyramidOptions};
pub use scalar::{Precision, Real, TwoFloat, C};
