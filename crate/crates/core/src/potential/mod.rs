//! Discrete potential operators on grid functions: Hardy-Littlewood and
//! fractional maximal functions, Riesz and Bessel potentials, the mean
//! oscillation modulus of `k`-th gradients, and the numerical checkers for
//! the trace-type (Adams) inequalities and the image-diameter bounds.
//!
//! Functions are extended by zero outside their box.

mod adams;
mod besov;
mod convolve;
mod diameter;
pub mod kernel;
mod maximal;

pub use adams::{adams_ratio, adams_ratio_with_table, integrate_pow, AdamsMode, AdamsRatio};
pub use besov::{besov_modulus, BesovModulus};
pub use convolve::{
    bessel_potential, bessel_potential_with, convolve, riesz_potential, riesz_potential_any_order,
    riesz_potential_at,
};
pub(crate) use diameter::image_diameter;
pub use diameter::{
    diam_bound_check, local_potential_ratio, split_local_far, DiamBound, DiamBoundContext, DiamMode,
    LocalPotentialRatio,
};
pub use kernel::{bessel_kernel, KernelKind, KernelSpec, KernelTable};
pub use maximal::{maximal, maximal_any_order, maximal_at, radius_ladder};
