//! Bessel and Riesz kernels, pointwise and integrated over grid cells.
//!
//! The Bessel kernel is evaluated through its subordination integral
//!
//! ```text
//! K_a(x) = (4π)^{-a/2} / Γ(a/2) ∫_0^∞ exp(-π|x|²/t) exp(-t/4π) t^{(a-n)/2} dt/t
//! ```
//!
//! in the variable `u = ln t`, where the integrand decays doubly
//! exponentially at `+∞` and at least exponentially at `-∞`, so the
//! trapezoid rule converges geometrically. Cell integrals use the same
//! representation: the Gaussian factor integrates over a box in closed form
//! through `erf`, which removes the singularity at the origin.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::grid::GridSpec;
use crate::math::gauss_legendre;

/// Default relative tolerance of the kernel quadratures.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Order of the angular rule used for Riesz kernels near the singularity.
pub const POLAR_ORDER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KernelKind {
    Bessel,
    Riesz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// `alpha` for Bessel kernels, `beta` for Riesz kernels.
    pub order: f64,
    pub dim: usize,
    pub tolerance: f64,
}

impl KernelSpec {
    pub fn bessel(alpha: f64, dim: usize) -> Result<Self> {
        let s = Self {
            kind: KernelKind::Bessel,
            order: alpha,
            dim,
            tolerance: DEFAULT_TOLERANCE,
        };
        s.validate()?;
        Ok(s)
    }

    /// Riesz kernel `|y|^{beta - n}` with `0 < beta < n`.
    pub fn riesz(beta: f64, dim: usize) -> Result<Self> {
        let s = Self {
            kind: KernelKind::Riesz,
            order: beta,
            dim,
            tolerance: DEFAULT_TOLERANCE,
        };
        s.validate()?;
        Ok(s)
    }

    /// Riesz kernel of any positive order. Orders `>= n` give a bounded
    /// (or growing) kernel, which is meaningful for compactly supported data.
    pub fn riesz_any_order(beta: f64, dim: usize) -> Result<Self> {
        let s = Self {
            kind: KernelKind::Riesz,
            order: beta,
            dim,
            tolerance: DEFAULT_TOLERANCE,
        };
        s.check_common()?;
        if !(beta > 0.0) {
            return Err(domain!("Riesz order must be positive, got {beta}"));
        }
        Ok(s)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn check_common(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(domain!("kernels are implemented for n = 1, 2; got {}", self.dim));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(domain!("tolerance must lie in (0, 1), got {}", self.tolerance));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_common()?;
        let n = self.dim as f64;
        match self.kind {
            KernelKind::Bessel if !(self.order > 0.0) => {
                Err(domain!("Bessel kernel needs alpha > 0, got {}", self.order))
            }
            KernelKind::Riesz if !(self.order > 0.0 && self.order < n) => {
                Err(domain!("Riesz kernel needs 0 < beta < n = {n}, got {}", self.order))
            }
            _ => Ok(()),
        }
    }

    /// Pointwise kernel value at distance `radius > 0`.
    pub fn eval(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(domain!("radius must be positive, got {radius}"));
        }
        match self.kind {
            KernelKind::Bessel => bessel_point(self.order, self.dim, radius, self.tolerance),
            KernelKind::Riesz => Ok(libm::pow(radius, self.order - self.dim as f64)),
        }
    }

    /// `∫_{[lo, hi]} K(|y|) dy` over an axis-aligned box.
    pub fn box_integral(&self, lo: &[f64], hi: &[f64]) -> Result<f64> {
        match self.kind {
            KernelKind::Bessel => bessel_box(self.order, self.dim, lo, hi, self.tolerance),
            KernelKind::Riesz => Ok(riesz_box(self.order, self.dim, lo, hi)),
        }
    }
}

/// Bessel kernel `K_alpha(|x|)` at `|x| = radius`.
pub fn bessel_kernel(spec: &KernelSpec, radius: f64) -> Result<f64> {
    if spec.kind != KernelKind::Bessel {
        return Err(domain!("bessel_kernel needs a Bessel kernel spec"));
    }
    spec.validate()?;
    spec.eval(radius)
}

fn bessel_prefactor(alpha: f64) -> f64 {
    libm::pow(4.0 * PI, -alpha / 2.0) / libm::tgamma(alpha / 2.0)
}

fn bessel_point(alpha: f64, dim: usize, radius: f64, tol: f64) -> Result<f64> {
    let n = dim as f64;
    let r2 = radius * radius;
    let power = (alpha - n) / 2.0;
    let f = |u: f64| {
        let t = libm::exp(u);
        libm::exp(-PI * r2 / t - t / (4.0 * PI) + power * u)
    };
    Ok(bessel_prefactor(alpha) * integrate_log_axis(f, tol)?)
}

/// `∫_a^b exp(-π s²/t) ds` for `a <= b`, with cancellation-free erfc forms.
fn gaussian_interval(a: f64, b: f64, t: f64) -> f64 {
    let c = libm::sqrt(PI / t);
    let half = 0.5 * libm::sqrt(t);
    let (a2, b2) = (a * c, b * c);
    let diff = if a2 >= 0.0 {
        libm::erfc(a2) - libm::erfc(b2)
    } else if b2 <= 0.0 {
        libm::erfc(-b2) - libm::erfc(-a2)
    } else {
        libm::erf(b2) - libm::erf(a2)
    };
    half * diff
}

fn bessel_box(alpha: f64, dim: usize, lo: &[f64], hi: &[f64], tol: f64) -> Result<f64> {
    let n = dim as f64;
    let power = (alpha - n) / 2.0;
    let f = |u: f64| {
        let t = libm::exp(u);
        let mut g = 1.0;
        for a in 0..dim {
            g *= gaussian_interval(lo[a], hi[a], t);
        }
        g * libm::exp(-t / (4.0 * PI) + power * u)
    };
    Ok(bessel_prefactor(alpha) * integrate_log_axis(f, tol)?)
}

/// `∫_{-∞}^{∞} f(u) du` for a smooth, nonnegative, unimodal-ish integrand
/// with fast decay on both sides, by scanning for the support and then
/// refining the trapezoid rule until the relative change is below `tol`.
fn integrate_log_axis(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    const U_MIN: f64 = -420.0;
    const U_MAX: f64 = 12.0;
    const SCAN: f64 = 0.5;
    const NEGLIGIBLE: f64 = 1e-20;

    let steps = ((U_MAX - U_MIN) / SCAN) as usize;
    let mut peak: f64 = 0.0;
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let u = U_MIN + i as f64 * SCAN;
        let v = f(u);
        if !v.is_finite() {
            return Err(Error::Numerical(alloc::format!(
                "kernel integrand not finite at ln t = {u}"
            )));
        }
        peak = peak.max(v);
        samples.push(v);
    }
    if peak == 0.0 {
        return Ok(0.0);
    }
    let cut = peak * NEGLIGIBLE;
    let first = samples.iter().position(|&v| v > cut).unwrap_or(0);
    let last = samples.iter().rposition(|&v| v > cut).unwrap_or(steps);
    let a = U_MIN + (first.saturating_sub(1)) as f64 * SCAN;
    let b = U_MIN + ((last + 1).min(steps)) as f64 * SCAN;

    let mut intervals = (((b - a) / SCAN) as usize).max(4);
    let mut h = (b - a) / intervals as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for i in 1..intervals {
        sum += f(a + i as f64 * h);
    }
    let mut estimate = sum * h;
    for _ in 0..14 {
        let mut mid = 0.0;
        for i in 0..intervals {
            mid += f(a + (i as f64 + 0.5) * h);
        }
        sum += mid;
        intervals *= 2;
        h *= 0.5;
        let next = sum * h;
        if (next - estimate).abs() <= tol * next.abs() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Numerical(alloc::format!(
        "trapezoid rule did not reach relative tolerance {tol} on [{a}, {b}] (last estimate {estimate})"
    )))
}

/// `∫_{[0,a]×[0,b]} |y|^{beta-2} dy` for `a, b >= 0`, in polar coordinates
/// split along the diagonal direction `atan(b/a)`.
fn riesz_corner_rect(beta: f64, a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let (nodes, weights) = polar_rule();
    let split = libm::atan2(b, a);
    let quad = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        nodes
            .iter()
            .zip(weights.iter())
            .map(|(x, w)| w * g(mid + half * x))
            .sum::<f64>()
            * half
    };
    let first = quad(0.0, split, &|th| libm::pow(a / libm::cos(th), beta) / beta);
    let second = quad(split, PI / 2.0, &|th| libm::pow(b / libm::sin(th), beta) / beta);
    first + second
}

fn polar_rule() -> (Vec<f64>, Vec<f64>) {
    gauss_legendre(POLAR_ORDER)
}

fn signed_corner(beta: f64, a: f64, b: f64) -> f64 {
    let s = a.signum() * b.signum();
    s * riesz_corner_rect(beta, a.abs(), b.abs())
}

fn riesz_box(beta: f64, dim: usize, lo: &[f64], hi: &[f64]) -> f64 {
    if dim == 1 {
        let anti = |u: f64| u.signum() * libm::pow(u.abs(), beta) / beta;
        return anti(hi[0]) - anti(lo[0]);
    }
    let dx = hi[0] - lo[0];
    let dy = hi[1] - lo[1];
    let cx = 0.5 * (hi[0] + lo[0]);
    let cy = 0.5 * (hi[1] + lo[1]);
    let dist = libm::sqrt(cx * cx + cy * cy);
    let diag = libm::sqrt(dx * dx + dy * dy);
    if dist >= 3.0 * diag {
        // smooth: tensor Gauss-Legendre
        let (x, w) = gauss_legendre(4);
        let mut total = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                let px = cx + 0.5 * dx * xi;
                let py = cy + 0.5 * dy * yj;
                let r = libm::sqrt(px * px + py * py);
                total += wi * wj * libm::pow(r, beta - 2.0);
            }
        }
        return total * 0.25 * dx * dy;
    }
    signed_corner(beta, hi[0], hi[1]) - signed_corner(beta, lo[0], hi[1])
        - signed_corner(beta, hi[0], lo[1])
        + signed_corner(beta, lo[0], lo[1])
}

/// Cell-integrated kernel on the lattice of a grid, indexed by absolute
/// per-axis cell offsets `0..extent`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelTable {
    pub spec: KernelSpec,
    pub step: f64,
    pub extent: usize,
    pub weights: Vec<f64>,
}

impl KernelTable {
    /// Builds `∫_{cell(d)} K(|y|) dy` for offsets `|d_a| < extent`.
    pub fn build(spec: KernelSpec, step: f64, extent: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(domain!("grid step must be positive"));
        }
        let h = step;
        let cell = |d: &[usize]| -> Result<f64> {
            let lo: Vec<f64> = d.iter().map(|&k| (k as f64 - 0.5) * h).collect();
            let hi: Vec<f64> = d.iter().map(|&k| (k as f64 + 0.5) * h).collect();
            spec.box_integral(&lo, &hi)
        };
        let weights = if spec.dim == 1 {
            (0..extent).map(|k| cell(&[k])).collect::<Result<Vec<_>>>()?
        } else {
            let mut w = alloc::vec![0.0; extent * extent];
            for j in 0..extent {
                for i in 0..=j {
                    let v = cell(&[i, j])?;
                    w[j * extent + i] = v;
                    w[i * extent + j] = v;
                }
            }
            w
        };
        Ok(Self {
            spec,
            step,
            extent,
            weights,
        })
    }

    /// Table large enough to convolve any two cells of `grid`.
    pub fn for_grid(spec: KernelSpec, grid: &GridSpec) -> Result<Self> {
        Self::build(spec, grid.step(), grid.cells_per_side)
    }

    #[inline]
    pub fn weight(&self, dx: usize, dy: usize) -> f64 {
        if self.spec.dim == 1 {
            self.weights[dx]
        } else {
            self.weights[dy * self.extent + dx]
        }
    }

    /// Sum of all weights with offsets in `(-extent, extent)^n`.
    pub fn total_mass(&self) -> f64 {
        if self.spec.dim == 1 {
            2.0 * self.weights.iter().sum::<f64>() - self.weights[0]
        } else {
            let mut total = 0.0;
            for j in 0..self.extent {
                for i in 0..self.extent {
                    let mult = if i == 0 { 1.0 } else { 2.0 } * if j == 0 { 1.0 } else { 2.0 };
                    total += mult * self.weights[j * self.extent + i];
                }
            }
            total
        }
    }

    /// Whether this table can serve `spec` on a grid with `step`, `cells`.
    pub fn matches(&self, spec: &KernelSpec, step: f64, cells: usize) -> bool {
        self.spec == *spec && self.step == step && self.extent >= cells
    }
}
