//! Scalar fields sampled at cell centers of a uniform grid on a cube in
//! `R^n`, `n ∈ {1, 2}`.
//!
//! Values are piecewise constant on cells for integration purposes. Cell
//! `(i, j)` of a planar grid is stored at `j * cells_per_side + i`, with `i`
//! along the first axis.

use alloc::vec::Vec;

use crate::dyadic::DyadicCube;
use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridFunction {
    dim: usize,
    corner: Vec<f64>,
    side: f64,
    cells_per_side: usize,
    values: Vec<f64>,
}

/// Geometry of a grid without its values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub dim: usize,
    pub corner: Vec<f64>,
    pub side: f64,
    pub cells_per_side: usize,
}

impl GridSpec {
    pub fn new(dim: usize, corner: Vec<f64>, side: f64, cells_per_side: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(domain!("grid dimension must be 1 or 2, got {dim}"));
        }
        if corner.len() != dim {
            return Err(domain!("corner has {} coordinates, expected {dim}", corner.len()));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(domain!("box side must be positive, got {side}"));
        }
        if cells_per_side == 0 {
            return Err(domain!("cells_per_side must be positive"));
        }
        Ok(Self {
            dim,
            corner,
            side,
            cells_per_side,
        })
    }

    /// Cube `[c, c + side]^n` with `cells` cells per axis.
    pub fn cube(dim: usize, corner: f64, side: f64, cells: usize) -> Result<Self> {
        Self::new(dim, alloc::vec![corner; dim], side, cells)
    }

    pub fn step(&self) -> f64 {
        self.side / self.cells_per_side as f64
    }

    pub fn len(&self) -> usize {
        self.cells_per_side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.step(), self.dim as f64)
    }

    /// Multi-index of a flat cell index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        let n = self.cells_per_side;
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx % n, idx / n]
        }
    }

    pub fn flatten(&self, ix: [usize; 2]) -> usize {
        if self.dim == 1 {
            ix[0]
        } else {
            ix[1] * self.cells_per_side + ix[0]
        }
    }

    /// Center of the cell with the given flat index.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let h = self.step();
        let ix = self.unflatten(idx);
        let mut c = [0.0; 2];
        for a in 0..self.dim {
            c[a] = self.corner[a] + (ix[a] as f64 + 0.5) * h;
        }
        c
    }

    /// Fractional cell coordinate `(x - corner)/h` along axis `a`.
    pub fn cell_coord(&self, a: usize, x: f64) -> f64 {
        (x - self.corner[a]) / self.step()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x
                .iter()
                .zip(&self.corner)
                .all(|(&xi, &c)| xi >= c && xi <= c + self.side)
    }

    pub fn contains_cube(&self, cube: &DyadicCube) -> bool {
        cube.dim() == self.dim
            && cube
                .lower_corner()
                .iter()
                .zip(cube.upper_corner())
                .zip(&self.corner)
                .all(|((&lo, hi), &c)| lo >= c && hi <= c + self.side)
    }

    /// Per-axis overlap lengths (in units of cells) of `[lo, hi]` with each
    /// cell index range, as `(first_index, weights)`.
    fn axis_overlap(&self, a: usize, lo: f64, hi: f64) -> (usize, Vec<f64>) {
        let n = self.cells_per_side as f64;
        let u0 = self.cell_coord(a, lo).clamp(0.0, n);
        let u1 = self.cell_coord(a, hi).clamp(0.0, n);
        if u1 <= u0 {
            return (0, Vec::new());
        }
        let first = libm::floor(u0) as usize;
        let last = (libm::ceil(u1) as usize).min(self.cells_per_side);
        let mut w = Vec::with_capacity(last - first);
        for i in first..last {
            let a0 = (i as f64).max(u0);
            let a1 = ((i + 1) as f64).min(u1);
            w.push((a1 - a0).max(0.0));
        }
        (first, w)
    }

    /// Cells meeting the box `[lo, hi]` with their overlap volume.
    pub fn box_weights(&self, lo: &[f64], hi: &[f64]) -> Vec<(usize, f64)> {
        let vol = self.cell_volume();
        let (f0, w0) = self.axis_overlap(0, lo[0], hi[0]);
        let mut out = Vec::new();
        if self.dim == 1 {
            for (k, w) in w0.iter().enumerate() {
                if *w > 0.0 {
                    out.push((f0 + k, w * vol));
                }
            }
        } else {
            let (f1, w1) = self.axis_overlap(1, lo[1], hi[1]);
            for (kj, wj) in w1.iter().enumerate() {
                for (ki, wi) in w0.iter().enumerate() {
                    let w = wi * wj;
                    if w > 0.0 {
                        out.push((self.flatten([f0 + ki, f1 + kj]), w * vol));
                    }
                }
            }
        }
        out
    }

    /// Flat indices of the cells whose centers lie in the closed box.
    pub fn cells_with_center_in(&self, lo: &[f64], hi: &[f64]) -> Vec<usize> {
        let range = |a: usize| -> Option<(usize, usize)> {
            let n = self.cells_per_side as f64;
            let a0 = libm::ceil(self.cell_coord(a, lo[a]) - 0.5).max(0.0);
            let a1 = libm::floor(self.cell_coord(a, hi[a]) - 0.5).min(n - 1.0);
            (a1 >= a0).then_some((a0 as usize, a1 as usize))
        };
        let mut out = Vec::new();
        let Some((i0, i1)) = range(0) else {
            return out;
        };
        if self.dim == 1 {
            out.extend(i0..=i1);
        } else if let Some((j0, j1)) = range(1) {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    out.push(self.flatten([i, j]));
                }
            }
        }
        out
    }
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(domain!(
                "grid needs {} values, got {}",
                spec.len(),
                values.len()
            ));
        }
        Ok(Self {
            dim: spec.dim,
            corner: spec.corner,
            side: spec.side,
            cells_per_side: spec.cells_per_side,
            values,
        })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.len();
        Self::new(spec, alloc::vec![0.0; len]).expect("length matches")
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..spec.len())
            .map(|i| {
                let c = spec.center(i);
                f(&c[..spec.dim])
            })
            .collect();
        Self::new(spec, values).expect("length matches")
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dim: self.dim,
            corner: self.corner.clone(),
            side: self.side,
            cells_per_side: self.cells_per_side,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn step(&self) -> f64 {
        self.side / self.cells_per_side as f64
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.step(), self.dim as f64)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        self.spec().center(idx)
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.spec(), values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Cellwise linear combination `a * self + b * other` on a common grid.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        if self.spec() != other.spec() {
            return Err(domain!("grid geometries differ"));
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            ..self.clone()
        })
    }

    /// `(sum |f|^p h^n)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| libm::pow(v.abs(), p)).sum();
        libm::pow(s * self.cell_volume(), 1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    /// `∫_{[lo,hi]} |f|^s` for the piecewise-constant extension (zero
    /// outside the box).
    pub fn integrate_box_pow(&self, lo: &[f64], hi: &[f64], s: f64) -> f64 {
        self.spec()
            .box_weights(lo, hi)
            .into_iter()
            .map(|(i, w)| w * libm::pow(self.values[i].abs(), s))
            .sum()
    }

    /// `∫_{[lo,hi]} f`.
    pub fn integrate_box(&self, lo: &[f64], hi: &[f64]) -> f64 {
        self.spec()
            .box_weights(lo, hi)
            .into_iter()
            .map(|(i, w)| w * self.values[i])
            .sum()
    }

    pub fn integrate_cube_pow(&self, cube: &DyadicCube, s: f64) -> f64 {
        self.integrate_box_pow(&cube.lower_corner(), &cube.upper_corner(), s)
    }

    /// Multilinear interpolation of the center values, clamped to the
    /// outermost centers.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let n = self.cells_per_side;
        let axis = |a: usize| -> (usize, usize, f64) {
            let u = (self.spec().cell_coord(a, x[a]) - 0.5).clamp(0.0, (n - 1) as f64);
            let i0 = (libm::floor(u) as usize).min(n - 1);
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, u - i0 as f64)
        };
        if self.dim == 1 {
            let (i0, i1, t) = axis(0);
            (1.0 - t) * self.values[i0] + t * self.values[i1]
        } else {
            let (i0, i1, s) = axis(0);
            let (j0, j1, t) = axis(1);
            let v = |i, j| self.values[j * n + i];
            (1.0 - s) * (1.0 - t) * v(i0, j0)
                + s * (1.0 - t) * v(i1, j0)
                + (1.0 - s) * t * v(i0, j1)
                + s * t * v(i1, j1)
        }
    }

    /// Value of the cell containing `x` (half-open cells, clamped).
    pub fn cell_value(&self, x: &[f64]) -> f64 {
        let n = self.cells_per_side;
        let mut ix = [0usize; 2];
        for a in 0..self.dim {
            let u = self.spec().cell_coord(a, x[a]);
            ix[a] = (libm::floor(u).max(0.0) as usize).min(n - 1);
        }
        self.values[self.spec().flatten(ix)]
    }

    /// Total variation along the grid (1-d), or summed over rows and
    /// columns (2-d).
    pub fn total_variation(&self) -> f64 {
        let n = self.cells_per_side;
        if self.dim == 1 {
            self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
        } else {
            let mut tv = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let v = self.values[j * n + i];
                    if i + 1 < n {
                        tv += (self.values[j * n + i + 1] - v).abs();
                    }
                    if j + 1 < n {
                        tv += (self.values[(j + 1) * n + i] - v).abs();
                    }
                }
            }
            tv
        }
    }

    /// Refines every cell into `2^n` children carrying the same value.
    pub fn prolong(&self) -> Self {
        let n = self.cells_per_side;
        let m = 2 * n;
        let spec = GridSpec {
            cells_per_side: m,
            ..self.spec()
        };
        let values = (0..spec.len())
            .map(|idx| {
                let [i, j] = spec.unflatten(idx);
                self.values[self.spec().flatten([i / 2, j / 2])]
            })
            .collect();
        Self::new(spec, values).expect("length matches")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn geometry_roundtrip() {
        let spec = GridSpec::cube(2, -1.0, 2.0, 8).unwrap();
        assert_eq!(spec.len(), 64);
        assert_eq!(spec.step(), 0.25);
        let idx = spec.flatten([3, 5]);
        assert_eq!(spec.unflatten(idx), [3, 5]);
        assert_eq!(spec.center(idx), [-1.0 + 3.5 * 0.25, -1.0 + 5.5 * 0.25]);
        assert!(GridSpec::cube(3, 0.0, 1.0, 4).is_err());
        assert!(GridFunction::new(spec, vec![0.0; 3]).is_err());
    }

    #[test]
    fn box_integrals_are_exact_for_cells() {
        let spec = GridSpec::cube(1, 0.0, 1.0, 4).unwrap();
        let f = GridFunction::new(spec, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(f.integrate_box(&[0.0], &[1.0]), 2.5);
        assert_relative_eq!(f.integrate_box(&[0.125], &[0.5]), 0.125 * 1.0 + 0.25 * 2.0);
        assert_relative_eq!(f.integrate_box(&[-3.0], &[0.25]), 0.25);
        assert_relative_eq!(f.integrate_box_pow(&[0.5], &[1.0], 2.0), 0.25 * (9.0 + 16.0));
    }

    #[test]
    fn prolong_preserves_integral_and_norms() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 4).unwrap();
        let f = GridFunction::from_fn(spec, |x| x[0] - 2.0 * x[1]);
        let g = f.prolong();
        assert_eq!(g.cells_per_side(), 8);
        assert_relative_eq!(f.integral(), g.integral(), epsilon = 1e-14);
        assert_relative_eq!(f.lp_norm(3.0), g.lp_norm(3.0), max_relative = 1e-14);
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(spec, |x| 3.0 * x[0] + x[1]);
        assert_relative_eq!(f.interpolate(&[0.4, 0.7]), 1.9, epsilon = 1e-13);
        let spec1 = GridSpec::cube(1, 0.0, 1.0, 16).unwrap();
        let g = GridFunction::from_fn(spec1, |x| x[0]);
        assert_relative_eq!(g.interpolate(&[0.31]), 0.31, epsilon = 1e-14);
    }

    #[test]
    fn centers_in_box() {
        let spec = GridSpec::cube(1, 0.0, 1.0, 8).unwrap();
        assert_eq!(spec.cells_with_center_in(&[0.25], &[0.5]), vec![2, 3]);
        assert!(spec.cells_with_center_in(&[2.0], &[3.0]).is_empty());
    }
}
