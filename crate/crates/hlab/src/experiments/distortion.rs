//! Dimension distortion of Cantor sets: exact dyadic covers at a ladder of
//! levels, regularized, pushed through a map; the `τ`-sums of the covers
//! are compared with the `σ`-sums of the image diameters.

use hlab_core::dyadic::{regularize_in, DEFAULT_ROOT_LEVEL};
use hlab_core::exponents::{sigma, Regime};
use hlab_core::fractal::{box_dimension, cantor_cover, cantor_set, CantorMode, DimensionEstimate};
use hlab_core::grid::GridSpec;
use hlab_core::potential::{bessel_potential_with, KernelSpec};
use hlab_core::slicing::{image_diameter_sum, Mapping};
use hlab_core::{DistortionParams, GridFunction, PointSet};
use rayon::prelude::*;
use serde::Serialize;

use super::synth::RandomDensity;
use super::trial_rng;
use crate::cache::KernelCache;
use crate::error::{HlabError, Result};
use crate::report::{all_passed, Check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CantorIdentity,
    CantorHolder,
    CantorBessel,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "cantor_identity" => Ok(Scenario::CantorIdentity),
            "cantor_holder" => Ok(Scenario::CantorHolder),
            "cantor_bessel" => Ok(Scenario::CantorBessel),
            other => Err(HlabError::Usage(format!(
                "unknown scenario '{other}'; expected cantor_identity, cantor_holder or cantor_bessel"
            ))),
        }
    }
}

/// Grid for synthesized maps: `cells` cells on `[corner, corner + side]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub corner: f64,
    pub side: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: DistortionParams,
    pub seed: u64,
    pub grid: GridConfig,
    pub trials: usize,
    pub cantor_ratio: f64,
    pub cantor_depth: u32,
    /// Cover levels, inclusive.
    pub levels: (i32, i32),
    /// Box-counting window, inclusive.
    pub dim_levels: (i32, i32),
    /// Exponent of the Hölder map.
    pub gamma: f64,
    /// Allowed excess of the `σ`-sum over its co-decay prediction.
    pub codecay_factor: f64,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            params: DistortionParams::new(1, 1.5, 2.0).expect("valid defaults"),
            seed,
            grid: GridConfig {
                corner: -2.0,
                side: 4.0,
                cells: 4096,
            },
            trials: 1,
            cantor_ratio: 1.0 / 3.0,
            cantor_depth: 14,
            levels: (4, 9),
            dim_levels: (4, 10),
            gamma: 0.5,
            codecay_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: i32,
    pub cover_size: usize,
    pub regular_size: usize,
    /// Sums over the regularized cover.
    pub tau_sum: f64,
    pub sigma_sum: f64,
    /// `σ-sum(l0) · τ-sum(l) / τ-sum(l0)`.
    pub predicted: f64,
    /// The same three quantities over the exact cover before
    /// regularization.
    pub raw_tau_sum: f64,
    pub raw_sigma_sum: f64,
    pub raw_predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionResults {
    pub tau: f64,
    pub sigma: f64,
    pub regime: Option<Regime>,
    pub expected_dimension: f64,
    pub levels: Vec<LevelRow>,
    pub dim_e: DimensionEstimate,
    pub dim_image: DimensionEstimate,
    /// Largest jump of the synthesized map between neighboring cells; the
    /// sampled image diameters can miss at most this much.
    pub grid_modulus: Option<f64>,
    pub tau_sum_nonincreasing: bool,
    pub sigma_sum_nonincreasing: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// The maps of the scenarios.
pub enum ScenarioMap {
    Identity,
    Holder(f64),
    Grid(GridFunction),
}

impl Mapping for ScenarioMap {
    fn apply(&self, x: &[f64]) -> f64 {
        match self {
            ScenarioMap::Identity => x[0],
            ScenarioMap::Holder(g) => x[0].signum() * x[0].abs().powf(*g),
            ScenarioMap::Grid(v) => v.interpolate(x),
        }
    }

    fn defined_at(&self, x: &[f64]) -> bool {
        match self {
            ScenarioMap::Grid(v) => v.defined_at(x),
            _ => true,
        }
    }

    fn image_diameter(&self, cube: &hlab_core::DyadicCube) -> f64 {
        match self {
            ScenarioMap::Grid(v) => v.image_diameter(cube),
            _ => {
                // both maps are increasing
                let lo = cube.lower_corner();
                let hi = cube.upper_corner();
                self.apply(&hi) - self.apply(&lo)
            }
        }
    }
}

/// `v = G_α(g)` for a seeded random `g ∈ L_p`, rescaled to unit range on
/// `[0, 1]`.
pub fn bessel_map(config: &ExperimentConfig, cache: &KernelCache) -> Result<GridFunction> {
    let spec = GridSpec::cube(1, config.grid.corner, config.grid.side, config.grid.cells)?;
    let mut rng = trial_rng(config.seed, 0);
    let g = RandomDensity::random(&mut rng, 1, -1.0, 2.0, 12, 0.9 / config.params.p);
    let table = cache.table_for_grid(KernelSpec::bessel(config.params.alpha, 1)?, &spec)?;
    let v = bessel_potential_with(&g.sample(&spec), &table)?;
    let inside: Vec<f64> = spec
        .cells_with_center_in(&[0.0], &[1.0])
        .into_iter()
        .map(|i| v.values()[i])
        .collect();
    let range = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - inside.iter().copied().fold(f64::INFINITY, f64::min);
    if !(range > 0.0) {
        return Ok(v);
    }
    Ok(v.scale(1.0 / range))
}

/// Per-level `τ`- and `σ`-sums on the regularized exact covers.
pub fn cover_sums<V: Mapping + Sync>(
    ratio: f64,
    levels: (i32, i32),
    tau: f64,
    sigma: f64,
    v: &V,
) -> Result<Vec<LevelRow>> {
    let mut rows: Vec<LevelRow> = (levels.0..=levels.1)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&level| {
            let cover = cantor_cover(ratio, level, tau)?;
            let regular = regularize_in(&cover, DEFAULT_ROOT_LEVEL)?;
            let fam = regular.family();
            Ok(LevelRow {
                level,
                cover_size: cover.len(),
                regular_size: fam.len(),
                tau_sum: fam.tau_weight(),
                sigma_sum: image_diameter_sum(fam, v, sigma),
                predicted: 0.0,
                raw_tau_sum: cover.tau_weight(),
                raw_sigma_sum: image_diameter_sum(&cover, v, sigma),
                raw_predicted: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = rows.first().map(|r| (r.tau_sum, r.sigma_sum, r.raw_tau_sum, r.raw_sigma_sum));
    if let Some((t0, s0, rt0, rs0)) = first {
        for r in &mut rows {
            r.predicted = if t0 > 0.0 { s0 * r.tau_sum / t0 } else { 0.0 };
            r.raw_predicted = if rt0 > 0.0 { rs0 * r.raw_tau_sum / rt0 } else { 0.0 };
        }
    }
    Ok(rows)
}

fn nonincreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}

pub fn run_distortion_experiment(config: &ExperimentConfig, cache: &KernelCache) -> Result<DistortionResults> {
    let e = cantor_set(config.cantor_ratio, config.cantor_depth, CantorMode::Endpoints, config.seed)?;
    let dim_e = box_dimension(&e, config.dim_levels.0, config.dim_levels.1)?;
    let tau = dim_e.value;
    let expected_dimension = 2f64.ln() / (1.0 / config.cantor_ratio).ln();
    let (map, sigma_value, regime) = match config.scenario {
        Scenario::CantorIdentity => (ScenarioMap::Identity, tau, None),
        Scenario::CantorHolder => (ScenarioMap::Holder(config.gamma), tau / config.gamma, None),
        Scenario::CantorBessel => {
            let s = sigma(&config.params, tau)?;
            (ScenarioMap::Grid(bessel_map(config, cache)?), s.value, Some(s.regime))
        }
    };
    let levels = cover_sums(config.cantor_ratio, config.levels, tau, sigma_value, &map)?;
    let image: PointSet = e.map_scalar(|x| map.apply(x), format!("{}:image", e.meta.generator))?;
    let dim_image = box_dimension(&image, config.dim_levels.0, config.dim_levels.1)?;
    let grid_modulus = match &map {
        ScenarioMap::Grid(v) => Some(
            v.values()
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };

    let excess = |pick: fn(&LevelRow) -> (f64, f64)| {
        levels
            .iter()
            .map(|r| {
                let (s, p) = pick(r);
                if p > 0.0 { s / p } else if s == 0.0 { 0.0 } else { f64::INFINITY }
            })
            .fold(0.0, f64::max)
    };
    let mut checks = vec![
        Check::at_most(
            "sigma-sum / co-decay prediction (regularized covers)",
            excess(|r| (r.sigma_sum, r.predicted)),
            config.codecay_factor,
        ),
        Check::at_most(
            "sigma-sum / co-decay prediction (exact covers)",
            excess(|r| (r.raw_sigma_sum, r.raw_predicted)),
            config.codecay_factor,
        ),
    ];
    match config.scenario {
        Scenario::CantorIdentity => {
            checks.push(Check::at_most(
                "co-decay prediction / sigma-sum (exact covers)",
                excess(|r| (r.raw_predicted, r.raw_sigma_sum)),
                config.codecay_factor,
            ));
            checks.push(Check::at_most("|dim E - expected|", (dim_e.value - expected_dimension).abs(), 0.05));
            checks.push(Check::at_most(
                "|dim v(E) - expected|",
                (dim_image.value - expected_dimension).abs(),
                0.05,
            ));
        }
        Scenario::CantorHolder => {
            checks.push(Check::at_most(
                "dim v(E) - dim E / gamma",
                dim_image.value - dim_e.value / config.gamma,
                0.05,
            ));
        }
        Scenario::CantorBessel => {
            checks.push(Check::at_most("dim v(E) - sigma(tau)", dim_image.value - sigma_value, 0.1));
        }
    }
    Ok(DistortionResults {
        tau,
        sigma: sigma_value,
        regime,
        expected_dimension,
        tau_sum_nonincreasing: nonincreasing(levels.iter().map(|r| r.tau_sum)),
        sigma_sum_nonincreasing: nonincreasing(levels.iter().map(|r| r.sigma_sum)),
        levels,
        dim_e,
        dim_image,
        grid_modulus,
        passed: all_passed(&checks),
        checks,
    })
}
