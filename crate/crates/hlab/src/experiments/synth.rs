//! Random test data defined on the continuum, so the same function can be
//! sampled at several resolutions.

use hlab_core::dyadic::{regularize_in, DEFAULT_ROOT_LEVEL};
use hlab_core::grid::GridSpec;
use hlab_core::{CubeFamily, DyadicCube, FrostmanMeasure, GridFunction};
use rand::Rng;
use serde::Serialize;

/// Sum of box indicators with random heights plus an optional integrable
/// spike `a |x - x0|^{-e}` cut off outside the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomDensity {
    pub support: (f64, f64),
    pub blocks: Vec<(Vec<f64>, Vec<f64>, f64)>,
    pub spike: Option<(Vec<f64>, f64, f64)>,
}

impl RandomDensity {
    /// `blocks` random boxes in `[lo, hi]^dim`; spike exponent drawn from
    /// `[0, spike_max)` when `spike_max > 0`.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64, blocks: usize, spike_max: f64) -> Self {
        let width = hi - lo;
        let mut out = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            let mut a = Vec::with_capacity(dim);
            let mut b = Vec::with_capacity(dim);
            for _ in 0..dim {
                let c = lo + width * rng.random::<f64>();
                let w = width * (0.02 + 0.3 * rng.random::<f64>());
                a.push((c - 0.5 * w).max(lo));
                b.push((c + 0.5 * w).min(hi));
            }
            let height = rng.random_range(-1.0..1.0);
            out.push((a, b, height));
        }
        let spike = (spike_max > 0.0).then(|| {
            let x0: Vec<f64> = (0..dim).map(|_| lo + width * (0.1 + 0.8 * rng.random::<f64>())).collect();
            let amp = 0.2 * rng.random::<f64>();
            let e = spike_max * rng.random::<f64>();
            (x0, amp, e)
        });
        Self {
            support: (lo, hi),
            blocks: out,
            spike,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (lo, hi) = self.support;
        if x.iter().any(|&t| t < lo || t > hi) {
            return 0.0;
        }
        let mut v = 0.0;
        for (a, b, h) in &self.blocks {
            if x.iter().zip(a.iter().zip(b)).all(|(t, (p, q))| *t >= *p && *t < *q) {
                v += h;
            }
        }
        if let Some((x0, amp, e)) = &self.spike {
            let r2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
            let r = r2.sqrt().max(1e-12);
            v += amp * r.powf(-e);
        }
        v
    }

    pub fn sample(&self, spec: &GridSpec) -> GridFunction {
        GridFunction::from_fn(spec.clone(), |x| self.eval(x))
    }
}

/// Regularized random family of `count` cubes with levels in
/// `level_range` inside `[0, 1]^dim`, weighted by `tau`.
pub fn random_family<R: Rng>(rng: &mut R, dim: usize, count: usize, level_range: (i32, i32), tau: f64) -> hlab_core::Result<FrostmanMeasure> {
    let cubes = (0..count)
        .map(|_| {
            let level = rng.random_range(level_range.0..=level_range.1);
            let n = 1i64 << level;
            DyadicCube::new(level, (0..dim).map(|_| rng.random_range(0..n)).collect())
        })
        .collect();
    let regular = regularize_in(&CubeFamily::new(tau, cubes), DEFAULT_ROOT_LEVEL)?;
    Ok(FrostmanMeasure::with_root(regular, DEFAULT_ROOT_LEVEL))
}
