use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::grid::GridFunction;

/// Radii `h, 2h, 4h, ...` up to the first one reaching the box diameter.
pub fn radius_ladder(f: &GridFunction) -> Vec<f64> {
    let h = f.step();
    let diam = f.side() * libm::sqrt(f.dim() as f64);
    let mut out = Vec::new();
    let mut r = h;
    loop {
        out.push(r);
        if r >= diam {
            break;
        }
        r *= 2.0;
    }
    out
}

/// `M_beta f(x) = sup_r r^beta ⨍_{B(x,r)} |f|` at the cell centers, with `r`
/// on [`radius_ladder`] and discrete balls made of the lattice cells whose
/// centers lie in the open ball. `beta = 0` is the Hardy-Littlewood maximal
/// function.
pub fn maximal(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    let n = f.dim() as f64;
    if !(beta >= 0.0 && beta < n) {
        return Err(domain!("maximal order must satisfy 0 <= beta < n = {n}, got {beta}"));
    }
    maximal_any_order(f, beta)
}

/// [`maximal`] without the `beta < n` restriction. The radius ladder is
/// capped at the box diameter, so the supremum stays finite.
pub fn maximal_any_order(f: &GridFunction, beta: f64) -> Result<GridFunction> {
    if !(beta >= 0.0) {
        return Err(domain!("maximal order must be nonnegative, got {beta}"));
    }
    let ladder = radius_ladder(f);
    let h = f.step();
    let n = f.cells_per_side();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let out = if f.dim() == 1 {
        let prefix = prefix_sums(&abs);
        (0..n)
            .map(|i| {
                let mut best: f64 = 0.0;
                for &r in &ladder {
                    // |k| h < r  <=>  |k| <= ceil(r/h) - 1
                    let reach = (libm::ceil(r / h) as i64 - 1).max(0);
                    let lo = i as i64 - reach;
                    let hi = i as i64 + reach;
                    let count = (2 * reach + 1) as f64;
                    let s = range_sum(&prefix, lo, hi);
                    best = best.max(libm::pow(r, beta) * s / count);
                }
                best
            })
            .collect()
    } else {
        let rows: Vec<Vec<f64>> = abs.chunks_exact(n).map(prefix_sums).collect();
        (0..n * n)
            .map(|idx| {
                let (i, j) = ((idx % n) as i64, (idx / n) as i64);
                let mut best: f64 = 0.0;
                for &r in &ladder {
                    let rr = r / h;
                    let reach = (libm::ceil(rr) as i64 - 1).max(0);
                    let mut count = 0i64;
                    let mut s = 0.0;
                    for dy in -reach..=reach {
                        let rem = rr * rr - (dy * dy) as f64;
                        if rem <= 0.0 {
                            continue;
                        }
                        let w = (libm::ceil(libm::sqrt(rem)) as i64 - 1).max(0);
                        // exact open-ball test on the boundary column
                        let w = if (w * w + dy * dy) as f64 >= rr * rr { w - 1 } else { w };
                        if w < 0 {
                            continue;
                        }
                        count += 2 * w + 1;
                        let row = j + dy;
                        if row >= 0 && row < n as i64 {
                            s += range_sum(&rows[row as usize], i - w, i + w);
                        }
                    }
                    if count > 0 {
                        best = best.max(libm::pow(r, beta) * s / count as f64);
                    }
                }
                best
            })
            .collect()
    };
    f.with_values(out)
}

/// `M_beta f` at an arbitrary point `x`, same ladder and lattice balls.
pub fn maximal_at(f: &GridFunction, beta: f64, x: &[f64]) -> Result<f64> {
    let nd = f.dim() as f64;
    if !(beta >= 0.0 && beta < nd) {
        return Err(domain!("maximal order must satisfy 0 <= beta < n = {nd}, got {beta}"));
    }
    if x.len() != f.dim() {
        return Err(domain!("point has {} coordinates, grid has dimension {}", x.len(), f.dim()));
    }
    let n = f.cells_per_side();
    let spec = f.spec();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    // open interval of lattice indices with |c_i - x| < r along an axis
    let open_range = |a: usize, center: f64, r: f64| -> (i64, i64) {
        let u = spec.cell_coord(a, center) - 0.5;
        let lo = libm::floor(u - r / f.step()) as i64 + 1;
        let hi = libm::ceil(u + r / f.step()) as i64 - 1;
        (lo, hi)
    };
    let mut best: f64 = 0.0;
    for r in radius_ladder(f) {
        let (s, count) = if f.dim() == 1 {
            let (lo, hi) = open_range(0, x[0], r);
            let prefix = prefix_sums(&abs);
            (range_sum(&prefix, lo, hi), (hi - lo + 1).max(0))
        } else {
            let (jlo, jhi) = open_range(1, x[1], r);
            let mut s = 0.0;
            let mut count = 0;
            for j in jlo..=jhi {
                let yj = spec.corner[1] + (j as f64 + 0.5) * f.step();
                let rem = r * r - (yj - x[1]) * (yj - x[1]);
                if rem <= 0.0 {
                    continue;
                }
                let (lo, hi) = open_range(0, x[0], libm::sqrt(rem));
                if hi < lo {
                    continue;
                }
                count += hi - lo + 1;
                if j >= 0 && j < n as i64 {
                    let row = &abs[j as usize * n..(j as usize + 1) * n];
                    s += row
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| (*i as i64) >= lo && (*i as i64) <= hi)
                        .map(|(_, v)| v)
                        .sum::<f64>();
                }
            }
            (s, count)
        };
        if count > 0 {
            best = best.max(libm::pow(r, beta) * s / count as f64);
        }
    }
    Ok(best)
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for x in v {
        acc += x;
        out.push(acc);
    }
    out
}

/// Sum of entries `lo..=hi`, clipped to the stored range.
fn range_sum(prefix: &[f64], lo: i64, hi: i64) -> f64 {
    let len = (prefix.len() - 1) as i64;
    let a = lo.max(0);
    let b = (hi + 1).min(len);
    if b <= a {
        0.0
    } else {
        prefix[b as usize] - prefix[a as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;

    #[test]
    fn constant_is_fixed() {
        for dim in [1, 2] {
            let spec = GridSpec::cube(dim, 0.0, 1.0, 16).unwrap();
            let f = GridFunction::from_fn(spec, |_| 2.5);
            let m = maximal(&f, 0.0).unwrap();
            for v in m.values() {
                assert_relative_eq!(*v, 2.5, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn indicator_far_point() {
        let spec = GridSpec::cube(1, -4.0, 8.0, 512).unwrap();
        let f = GridFunction::from_fn(spec, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
        let m = maximal_at(&f, 0.0, &[2.0]).unwrap();
        assert!((m - 0.25).abs() < 0.02, "{m}");
    }

    #[test]
    fn dominates_modulus_and_is_sublinear() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(spec.clone(), |x| libm::sin(9.0 * x[0]) * x[1]);
        let g = GridFunction::from_fn(spec, |x| libm::cos(5.0 * x[1]) - x[0]);
        let mf = maximal(&f, 0.0).unwrap();
        let mg = maximal(&g, 0.0).unwrap();
        let mfg = maximal(&f.combine(1.0, &g, 1.0).unwrap(), 0.0).unwrap();
        for i in 0..f.len() {
            assert!(mf.values()[i] >= f.values()[i].abs() - 1e-15);
            assert!(mfg.values()[i] <= mf.values()[i] + mg.values()[i] + 1e-12);
        }
    }

    #[test]
    fn node_and_point_evaluations_agree() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 8).unwrap();
        let f = GridFunction::from_fn(spec.clone(), |x| x[0] * x[0] + 3.0 * x[1]);
        let m = maximal(&f, 0.5).unwrap();
        for idx in [0, 9, 27, 63] {
            let c = spec.center(idx);
            assert_relative_eq!(maximal_at(&f, 0.5, &c).unwrap(), m.values()[idx], max_relative = 1e-12);
        }
        assert!(maximal(&f, 2.0).is_err());
        assert!(maximal_any_order(&f, 2.0).is_ok());
    }
}
