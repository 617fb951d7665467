use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::grid::GridFunction;

/// Mean oscillation `Ω^k_v(x, t)` of the discrete `k`-th gradient at every
/// cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovModulus {
    /// Zero at nodes that are not `valid`.
    pub field: GridFunction,
    /// Nodes whose cube stays clear of the one-sided boundary differences.
    pub valid: Vec<bool>,
    pub t: f64,
    pub k: u32,
}

impl BesovModulus {
    /// `‖Ω(·, t)‖_{L^p}` over the valid nodes.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol = self.field.cell_volume();
        let s: f64 = self
            .field
            .values()
            .iter()
            .zip(&self.valid)
            .filter(|(_, ok)| **ok)
            .map(|(v, _)| libm::pow(v.abs(), p))
            .sum();
        libm::pow(s * vol, 1.0 / p)
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }
}

/// Components of `∇^k v` by centered differences (one-sided on the
/// outermost cells), each with the multiplicity it has in the Euclidean
/// norm of the full tensor.
fn gradient(v: &GridFunction, k: u32) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = v.cells_per_side();
    let h = v.step();
    let vals = v.values();
    if k == 0 {
        return (vec![vals.to_vec()], vec![1.0]);
    }
    let at = |i: usize, j: usize| vals[j * n + i];
    // second-order stencils on an index triple clamped to the grid
    let d1 = |get: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        if i == 0 {
            (get(1) - get(0)) / h
        } else if i == n - 1 {
            (get(n - 1) - get(n - 2)) / h
        } else {
            (get(i + 1) - get(i - 1)) / (2.0 * h)
        }
    };
    let d2 = |get: &dyn Fn(usize) -> f64, i: usize| -> f64 {
        let c = i.clamp(1, n - 2);
        (get(c + 1) - 2.0 * get(c) + get(c - 1)) / (h * h)
    };
    if v.dim() == 1 {
        let get = |i: usize| vals[i];
        let comp: Vec<f64> = (0..n)
            .map(|i| if k == 1 { d1(&get, i) } else { d2(&get, i) })
            .collect();
        return (vec![comp], vec![1.0]);
    }
    let mut comps = Vec::new();
    let mut mult = Vec::new();
    let idx = |m: usize| (m % n, m / n);
    if k == 1 {
        comps.push((0..n * n).map(|m| { let (i, j) = idx(m); d1(&|a| at(a, j), i) }).collect());
        comps.push((0..n * n).map(|m| { let (i, j) = idx(m); d1(&|b| at(i, b), j) }).collect());
        mult.extend([1.0, 1.0]);
    } else {
        comps.push((0..n * n).map(|m| { let (i, j) = idx(m); d2(&|a| at(a, j), i) }).collect());
        comps.push((0..n * n).map(|m| { let (i, j) = idx(m); d2(&|b| at(i, b), j) }).collect());
        let dx = |j: usize| -> Vec<f64> { (0..n).map(|i| d1(&|a| at(a, j), i)).collect() };
        let rows: Vec<Vec<f64>> = (0..n).map(dx).collect();
        comps.push((0..n * n).map(|m| { let (i, j) = idx(m); d1(&|b| rows[b][i], j) }).collect());
        mult.extend([1.0, 1.0, 2.0]);
    }
    (comps, mult)
}

/// `Ω^k_v(x, t) = ⨍_{Q(x,t)} |∇^k v - (∇^k v)_Q|` with `Q(x,t)` the cube of
/// side `t` centered at the node. `t = m h`; for even `m` the two outermost
/// cell layers enter with half weight so the cube has side exactly `t`.
pub fn besov_modulus(v: &GridFunction, k: u32, t: f64) -> Result<BesovModulus> {
    if k > 2 {
        return Err(domain!("gradients are implemented up to order 2, got k = {k}"));
    }
    let h = v.step();
    let m_real = t / h;
    let m = libm::round(m_real);
    if !(m >= 1.0) || (m_real - m).abs() > 1e-9 * m.max(1.0) {
        return Err(domain!("t = {t} must be a positive multiple of the grid step {h}"));
    }
    let m = m as usize;
    let n = v.cells_per_side();
    if n < 3 {
        return Err(domain!("grid too small for centered differences"));
    }
    let (comps, mult) = gradient(v, k);
    // offsets and weights along one axis
    let (reach, half_ends) = if m % 2 == 1 { ((m - 1) / 2, false) } else { (m / 2, true) };
    let axis_w: Vec<f64> = (0..=2 * reach)
        .map(|q| if half_ends && (q == 0 || q == 2 * reach) { 0.5 } else { 1.0 })
        .collect();
    // boundary cells (one-sided differences) are excluded; k = 0 needs none
    let margin = if k == 0 { 0 } else { 1 };
    let lo_ok = reach + margin;
    let valid_axis = |i: usize| i >= lo_ok && i + lo_ok < n;
    let mut field = vec![0.0; v.len()];
    let mut valid = vec![false; v.len()];
    let mut mean = vec![0.0; comps.len()];
    for node in 0..v.len() {
        let (i, j) = (node % n, node / n);
        let ok = valid_axis(i) && (v.dim() == 1 || valid_axis(j));
        if !ok {
            continue;
        }
        valid[node] = true;
        let cells: Vec<(usize, f64)> = if v.dim() == 1 {
            (0..=2 * reach).map(|q| (i + q - reach, axis_w[q])).collect()
        } else {
            let mut c = Vec::with_capacity(axis_w.len() * axis_w.len());
            for (qb, wb) in axis_w.iter().enumerate() {
                for (qa, wa) in axis_w.iter().enumerate() {
                    c.push(((j + qb - reach) * n + i + qa - reach, wa * wb));
                }
            }
            c
        };
        let wsum: f64 = cells.iter().map(|c| c.1).sum();
        for (c, comp) in comps.iter().enumerate() {
            mean[c] = cells.iter().map(|&(q, w)| w * comp[q]).sum::<f64>() / wsum;
        }
        let osc: f64 = cells
            .iter()
            .map(|&(q, w)| {
                let sq: f64 = comps
                    .iter()
                    .zip(&mult)
                    .zip(&mean)
                    .map(|((comp, mu), avg)| mu * (comp[q] - avg) * (comp[q] - avg))
                    .sum();
                w * libm::sqrt(sq)
            })
            .sum();
        field[node] = osc / wsum;
    }
    Ok(BesovModulus {
        field: v.with_values(field)?,
        valid,
        t,
        k,
    })
}
