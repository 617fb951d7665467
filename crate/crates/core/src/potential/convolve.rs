use alloc::vec::Vec;

use super::kernel::{KernelSpec, KernelTable};
use crate::error::{domain, Result};
use crate::grid::GridFunction;

/// Direct-summation convolution of `f` with a cell-integrated kernel:
/// `out_i = sum_j f_j ∫_{cell_j} K(|x_i - y|) dy`.
pub fn convolve(f: &GridFunction, table: &KernelTable) -> Result<GridFunction> {
    let n = f.cells_per_side();
    if table.spec.dim != f.dim() {
        return Err(domain!("kernel dimension {} != grid dimension {}", table.spec.dim, f.dim()));
    }
    if table.step != f.step() || table.extent < n {
        return Err(domain!(
            "kernel table (step {}, extent {}) does not fit grid (step {}, {} cells)",
            table.step,
            table.extent,
            f.step(),
            n
        ));
    }
    let vals = f.values();
    let out: Vec<f64> = if f.dim() == 1 {
        let w = &table.weights;
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (j, &v) in vals.iter().enumerate() {
                    if v != 0.0 {
                        acc += v * w[i.abs_diff(j)];
                    }
                }
                acc
            })
            .collect()
    } else {
        let support: Vec<(usize, usize, f64)> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(idx, &v)| (idx % n, idx / n, v))
            .collect();
        (0..n * n)
            .map(|idx| {
                let (i, j) = (idx % n, idx / n);
                support
                    .iter()
                    .map(|&(k, l, v)| v * table.weight(i.abs_diff(k), j.abs_diff(l)))
                    .sum()
            })
            .collect()
    };
    f.with_values(out)
}

/// `I_beta f(x) = ∫ f(y) |y - x|^{beta - n} dy` at the cell centers,
/// `0 < beta < n`.
pub fn riesz_potential(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    let spec = KernelSpec::riesz(beta, f.dim())?;
    convolve(f, &KernelTable::for_grid(spec, &f.spec())?)
}

/// Riesz potential for any `beta > 0`; for `beta >= n` the kernel is
/// bounded on the box and the integral is still finite.
pub fn riesz_potential_any_order(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    let spec = KernelSpec::riesz_any_order(beta, f.dim())?;
    convolve(f, &KernelTable::for_grid(spec, &f.spec())?)
}

/// `I_beta f` at an arbitrary point, integrating the kernel exactly over
/// every cell.
pub fn riesz_potential_at(f: &GridFunction, beta: f64, x: &[f64]) -> Result<f64> {
    let spec = KernelSpec::riesz(beta, f.dim())?;
    if x.len() != f.dim() {
        return Err(domain!("point has {} coordinates, grid has dimension {}", x.len(), f.dim()));
    }
    let grid = f.spec();
    let h = f.step();
    let mut total = 0.0;
    for (idx, &v) in f.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let c = grid.center(idx);
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for a in 0..f.dim() {
            lo[a] = c[a] - 0.5 * h - x[a];
            hi[a] = c[a] + 0.5 * h - x[a];
        }
        total += v * spec.box_integral(&lo[..f.dim()], &hi[..f.dim()])?;
    }
    Ok(total)
}

/// `v = G_alpha(g) = K_alpha * g` at the cell centers.
pub fn bessel_potential(g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let spec = KernelSpec::bessel(alpha, g.dim())?;
    convolve(g, &KernelTable::for_grid(spec, &g.spec())?)
}

/// [`bessel_potential`] with a prebuilt (for example cached) table.
pub fn bessel_potential_with(g: &GridFunction, table: &KernelTable) -> Result<GridFunction> {
    if table.spec.kind != super::kernel::KernelKind::Bessel {
        return Err(domain!("expected a Bessel kernel table"));
    }
    convolve(g, table)
}
