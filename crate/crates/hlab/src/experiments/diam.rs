//! Image-diameter bounds on random dyadic cubes: the largest ratio of the
//! image diameter to the bracketed bound, compared across grid refinement
//! and trial doubling.

use hlab_core::grid::GridSpec;
use hlab_core::potential::{DiamBoundContext, DiamMode, KernelSpec};
use hlab_core::{DyadicCube, GridFunction};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::synth::RandomDensity;
use super::{max_of, spread, trial_rng};
use crate::cache::KernelCache;
use crate::error::Result;
use crate::report::{all_passed, Check};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamConfig {
    pub mode: DiamMode,
    pub alpha: f64,
    pub p: f64,
    pub theta: f64,
    /// Cells of the coarse grid on `[-2, 2]`.
    pub cells: usize,
    pub trials: usize,
    /// Cubes drawn per random `g`.
    pub cubes_per_function: usize,
    /// Cube levels are drawn from this range.
    pub levels: (i32, i32),
    pub seed: u64,
}

impl DiamConfig {
    /// `n = 1`, `(α, p) = (2, 3)`, `θ = 1/2`, 200 trials.
    pub fn default_for(mode: DiamMode) -> Self {
        Self {
            mode,
            alpha: 2.0,
            p: 3.0,
            theta: 0.5,
            cells: 1024,
            trials: 200,
            cubes_per_function: 10,
            levels: (2, 6),
            seed: 20240602,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamTrial {
    pub level: i32,
    pub coord: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiamResults {
    pub trials: Vec<DiamTrial>,
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    pub max_ratio_doubled: f64,
    pub refinement_spread: f64,
    pub doubling_spread: f64,
    pub zero_data_ratio: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Grid box `[-2, 2]`.
const BOX_CORNER: f64 = -2.0;
const BOX_SIDE: f64 = 4.0;

fn function_and_cubes(config: &DiamConfig, index: usize) -> (RandomDensity, Vec<DyadicCube>) {
    let mut rng = trial_rng(config.seed, index as u64);
    let g = RandomDensity::random(&mut rng, 1, -1.5, 1.5, 8, 0.9 / config.p);
    let cubes = (0..config.cubes_per_function)
        .map(|_| {
            let level = rng.random_range(config.levels.0..=config.levels.1);
            // Q inside [-1, 1], at distance >= 1 from the box boundary
            let n = 1i64 << level;
            DyadicCube::new(level, vec![rng.random_range(-n..n)])
        })
        .collect();
    (g, cubes)
}

fn run_at(config: &DiamConfig, functions: &[(RandomDensity, Vec<DyadicCube>)], cells: usize, cache: &KernelCache) -> Result<Vec<DiamTrial>> {
    let spec = GridSpec::cube(1, BOX_CORNER, BOX_SIDE, cells)?;
    let table = cache.table_for_grid(KernelSpec::bessel(config.alpha, 1)?, &spec)?;
    let per_fn: Vec<Vec<DiamTrial>> = functions
        .par_iter()
        .map(|(g, cubes)| {
            let ctx = DiamBoundContext::with_table(&g.sample(&spec), &table, config.p, config.theta, config.mode)?;
            cubes
                .iter()
                .map(|q| {
                    let b = ctx.check(q)?;
                    Ok(DiamTrial {
                        level: q.level,
                        coord: q.coords[0],
                        lhs: b.lhs,
                        rhs: b.rhs,
                        ratio: b.ratio,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_fn.into_iter().flatten().collect())
}

pub fn run_diam_check(config: &DiamConfig, cache: &KernelCache) -> Result<DiamResults> {
    let per = config.cubes_per_function.max(1);
    let groups = config.trials.div_ceil(per);
    let functions: Vec<_> = (0..2 * groups).map(|i| function_and_cubes(config, i)).collect();
    let coarse_all = run_at(config, &functions, config.cells, cache)?;
    let fine = run_at(config, &functions[..groups], 2 * config.cells, cache)?;
    let first: Vec<DiamTrial> = coarse_all[..config.trials].to_vec();
    let ratios = |ts: &[DiamTrial]| ts.iter().map(|t| t.ratio).collect::<Vec<_>>();
    let max_ratio = max_of(&ratios(&first));
    let max_ratio_refined = max_of(&ratios(&fine[..config.trials]));
    let max_ratio_doubled = max_of(&ratios(&coarse_all[..2 * config.trials]));

    let spec = GridSpec::cube(1, BOX_CORNER, BOX_SIDE, config.cells)?;
    let table = cache.table_for_grid(KernelSpec::bessel(config.alpha, 1)?, &spec)?;
    let zero = GridFunction::zeros(spec);
    let zero_data_ratio = DiamBoundContext::with_table(&zero, &table, config.p, config.theta, config.mode)?
        .check(&DyadicCube::new(config.levels.0, vec![0]))?
        .ratio;

    let refinement_spread = spread(max_ratio, max_ratio_refined);
    let doubling_spread = spread(max_ratio, max_ratio_doubled);
    let checks = vec![
        Check::below("max ratio finite", if max_ratio.is_finite() { 0.0 } else { 1.0 }, 0.5),
        Check::below("refinement spread", refinement_spread, 2.0),
        Check::below("trial doubling spread", doubling_spread, 2.0),
        Check::at_most("zero data ratio", zero_data_ratio, 0.0),
    ];
    Ok(DiamResults {
        trials: first,
        max_ratio,
        max_ratio_refined,
        max_ratio_doubled,
        refinement_spread,
        doubling_spread,
        zero_data_ratio,
        passed: all_passed(&checks),
        checks,
    })
}
