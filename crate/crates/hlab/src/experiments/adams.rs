//! Empirical constants of the trace inequalities: the largest ratio over
//! seeded trials, compared across grid refinement and trial doubling.

use hlab_core::dyadic::PiecewiseUniform;
use hlab_core::grid::GridSpec;
use hlab_core::potential::{adams_ratio, adams_ratio_with_table, AdamsMode, KernelSpec, KernelTable};
use rayon::prelude::*;
use serde::Serialize;

use super::synth::{random_family, RandomDensity};
use super::{max_of, spread, trial_rng};
use crate::cache::KernelCache;
use crate::error::Result;
use crate::report::{all_passed, Check};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdamsConfig {
    pub mode: AdamsMode,
    pub alpha: f64,
    pub p: f64,
    pub s: f64,
    /// Cells of the coarse grid on `[0, 1]`.
    pub cells: usize,
    pub trials: usize,
    pub seed: u64,
}

impl AdamsConfig {
    /// `n = 1`, `α = 1/4`, `p = 2`; `s = 5/2` in the Riesz mode, `s = p`
    /// otherwise.
    pub fn default_for(mode: AdamsMode) -> Self {
        Self {
            mode,
            alpha: 0.25,
            p: 2.0,
            s: if mode == AdamsMode::Riesz { 2.5 } else { 2.0 },
            cells: 256,
            trials: 100,
            seed: 20240601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdamsResults {
    pub beta: f64,
    /// Ratios of the first `trials` trials on the coarse grid.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    pub max_ratio_doubled: f64,
    pub refinement_spread: f64,
    pub doubling_spread: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Trial {
    g: RandomDensity,
    mu: PiecewiseUniform,
}

fn make_trial(config: &AdamsConfig, beta: f64, index: usize) -> Result<Trial> {
    let mut rng = trial_rng(config.seed, index as u64);
    let spike_max = 0.9 / config.p;
    let g = RandomDensity::random(&mut rng, 1, 0.0, 1.0, 6, spike_max);
    let mu = if index.is_multiple_of(4) {
        PiecewiseUniform::lebesgue_unit(1)
    } else {
        let count = 1 + index % 7;
        random_family(&mut rng, 1, count, (0, 7), beta)?.as_piecewise().clone()
    };
    Ok(Trial { g, mu })
}

fn ratios_at(config: &AdamsConfig, trials: &[Trial], cells: usize, cache: &KernelCache) -> Result<Vec<f64>> {
    let spec = GridSpec::cube(1, 0.0, 1.0, cells)?;
    let table: Option<KernelTable> = match config.mode {
        AdamsMode::Maximal => None,
        _ => Some(cache.table_for_grid(KernelSpec::riesz(config.alpha, 1)?, &spec)?),
    };
    trials
        .par_iter()
        .map(|t| {
            let g = t.g.sample(&spec);
            let r = match &table {
                Some(tab) => adams_ratio_with_table(&g, &t.mu, tab, config.p, config.s, config.mode)?,
                None => adams_ratio(&g, &t.mu, config.alpha, config.p, config.s, config.mode)?,
            };
            Ok(r.ratio)
        })
        .collect()
}

pub fn run_adams_check(config: &AdamsConfig, cache: &KernelCache) -> Result<AdamsResults> {
    let n = 1.0;
    let beta = match config.mode {
        AdamsMode::Lorentz => n - config.alpha * config.p,
        _ => config.s / config.p * (n - config.alpha * config.p),
    };
    let trials = (0..2 * config.trials)
        .map(|i| make_trial(config, beta, i))
        .collect::<Result<Vec<_>>>()?;
    let coarse_all = ratios_at(config, &trials, config.cells, cache)?;
    let fine = ratios_at(config, &trials[..config.trials], 2 * config.cells, cache)?;
    let ratios = coarse_all[..config.trials].to_vec();
    let max_ratio = max_of(&ratios);
    let max_ratio_refined = max_of(&fine);
    let max_ratio_doubled = max_of(&coarse_all);
    let refinement_spread = spread(max_ratio, max_ratio_refined);
    let doubling_spread = spread(max_ratio, max_ratio_doubled);
    let checks = vec![
        Check::below("max ratio finite", if max_ratio.is_finite() { 0.0 } else { 1.0 }, 0.5),
        Check::below("refinement spread", refinement_spread, 2.0),
        Check::below("trial doubling spread", doubling_spread, 2.0),
    ];
    Ok(AdamsResults {
        beta,
        ratios,
        max_ratio,
        max_ratio_refined,
        max_ratio_doubled,
        refinement_spread,
        doubling_spread,
        passed: all_passed(&checks),
        checks,
    })
}
