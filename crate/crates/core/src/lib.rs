//! Computational kit for Hausdorff-dimension distortion under Sobolev and
//! Bessel-potential mappings.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: exponent formulas, dyadic cube covers and the measures built
//! on them, box-counting estimators, discrete potential operators, lacunary
//! series and the cover-based set functions used by the experiments. File
//! formats, caching and the command line live in the `hlab` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod math;

pub mod dyadic;
pub mod exponents;
pub mod fractal;
pub mod grid;
pub mod lacunary;
pub mod potential;
pub mod slicing;

pub use dyadic::{CubeFamily, DyadicCube, FrostmanMeasure, RegularFamily};
pub use error::{Error, Result};
pub use exponents::{DistortionParams, Regime};
pub use fractal::{DimensionEstimate, PointSet};
pub use grid::GridFunction;
pub use lacunary::LacunarySeries;
