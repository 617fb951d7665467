//! Slice check: the Hölder splitting of the `Φ` sum into a `τ`-factor and a
//! `σ`-factor, evaluated on every regularized cover of a scenario.

use hlab_core::dyadic::{regularize_in, DEFAULT_ROOT_LEVEL};
use hlab_core::exponents::sigma;
use hlab_core::fractal::{box_dimension, cantor_cover, cantor_set, CantorMode};
use hlab_core::slicing::{holder_split, HolderSplit};
use serde::Serialize;

use super::distortion::{bessel_map, ExperimentConfig, Scenario, ScenarioMap};
use crate::cache::KernelCache;
use crate::error::{HlabError, Result};
use crate::report::{all_passed, Check};

/// Relative slack allowed in the finite-sum Hölder inequality.
pub const HOLDER_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceRow {
    pub level: i32,
    /// Size of the regularized cover.
    pub cover_size: usize,
    pub split: HolderSplit,
    pub holds: bool,
    /// The same split on the exact cover before regularization.
    pub raw_cover_size: usize,
    pub raw_split: HolderSplit,
    pub raw_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NstarResults {
    pub tau: f64,
    pub sigma: f64,
    pub q: f64,
    /// `τ(1 - q/σ)`.
    pub slice_exponent: f64,
    pub levels: Vec<SliceRow>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn run_nstar_slice_check(config: &ExperimentConfig, q: f64, cache: &KernelCache) -> Result<NstarResults> {
    let e = cantor_set(config.cantor_ratio, config.cantor_depth, CantorMode::Endpoints, config.seed)?;
    let tau = box_dimension(&e, config.dim_levels.0, config.dim_levels.1)?.value;
    let (map, sigma_value) = match config.scenario {
        Scenario::CantorIdentity => (ScenarioMap::Identity, tau),
        Scenario::CantorHolder => (ScenarioMap::Holder(config.gamma), tau / config.gamma),
        Scenario::CantorBessel => (ScenarioMap::Grid(bessel_map(config, cache)?), sigma(&config.params, tau)?.value),
    };
    if !(q > 0.0 && q <= sigma_value) {
        return Err(HlabError::Core(hlab_core::Error::Domain(format!(
            "q must lie in (0, sigma] = (0, {sigma_value}], got {q}"
        ))));
    }
    let mut levels = Vec::new();
    for level in config.levels.0..=config.levels.1 {
        let cover = cantor_cover(config.cantor_ratio, level, tau)?;
        let regular = regularize_in(&cover, DEFAULT_ROOT_LEVEL)?;
        let split = holder_split(regular.family(), &map, tau, sigma_value, q)?;
        let raw_split = holder_split(&cover, &map, tau, sigma_value, q)?;
        levels.push(SliceRow {
            level,
            cover_size: regular.family().len(),
            holds: split.holds(HOLDER_RTOL),
            split,
            raw_cover_size: cover.len(),
            raw_holds: raw_split.holds(HOLDER_RTOL),
            raw_split,
        });
    }
    let excess = |s: &HolderSplit| {
        if s.rhs > 0.0 {
            s.lhs / s.rhs - 1.0
        } else if s.lhs == 0.0 {
            -1.0
        } else {
            f64::INFINITY
        }
    };
    let worst = levels
        .iter()
        .flat_map(|r| [excess(&r.split), excess(&r.raw_split)])
        .fold(f64::NEG_INFINITY, f64::max);
    let checks = vec![Check::at_most("max relative excess of lhs over rhs", worst, HOLDER_RTOL)];
    Ok(NstarResults {
        tau,
        sigma: sigma_value,
        q,
        slice_exponent: tau * (1.0 - q / sigma_value),
        levels,
        passed: all_passed(&checks),
        checks,
    })
}
