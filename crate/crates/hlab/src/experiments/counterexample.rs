//! Probes of the lacunary counterexample: truncation certificates,
//! evenness, difference-quotient oscillation against a smooth control, and
//! the decay of the first-order modulus.

use hlab_core::grid::GridSpec;
use hlab_core::lacunary::{
    besov_membership_probe, difference_quotient_probe, geometric_scales, BesovProbe, LacunarySeries,
};
use hlab_core::math::median;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::trial_rng;
use crate::error::Result;
use crate::report::{all_passed, Check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    Quotients,
    Besov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleConfig {
    pub sigma: f64,
    pub terms: u32,
    pub probe: Probe,
    pub seed: u64,
    pub points: usize,
    /// Scales `5^{-j}` for `j` in this range.
    pub scale_exponents: (u32, u32),
    /// Grid for the modulus probe: `cells` cells on `[-1, 1]`.
    pub cells: usize,
    /// Modulus scales `2^{-j}` for `j` in this range.
    pub besov_exponents: (u32, u32),
    pub p: f64,
    /// Required ratio of the median oscillations of the series and of
    /// `sin`.
    pub separation: f64,
}

impl CounterexampleConfig {
    pub fn new(probe: Probe, seed: u64) -> Self {
        Self {
            sigma: 0.4,
            terms: 20,
            probe,
            seed,
            points: 200,
            scale_exponents: (3, 10),
            cells: 1 << 14,
            besov_exponents: (3, 7),
            p: 3.0,
            separation: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub x: f64,
    pub quotients: Vec<f64>,
    pub oscillation: f64,
    pub control_oscillation: f64,
    /// `|f_{M+5}(x) - f_M(x)|`.
    pub truncation_gap: f64,
    pub even: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientSummary {
    pub scales: Vec<f64>,
    pub tail_bound: f64,
    pub median_oscillation: f64,
    pub median_control_oscillation: f64,
    pub median_abs_quotient: f64,
    pub separation_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleResults {
    pub in_counterexample_range: bool,
    pub points: Vec<PointRow>,
    pub quotients: Option<QuotientSummary>,
    pub besov_series: Option<BesovProbe>,
    pub besov_control: Option<BesovProbe>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn run_counterexample(config: &CounterexampleConfig) -> Result<CounterexampleResults> {
    let series = LacunarySeries::f_sigma(config.sigma)?.with_terms(config.terms);
    let longer = series.with_terms(config.terms + 5);
    let mut rng = trial_rng(config.seed, 0);
    let xs: Vec<f64> = (0..config.points).map(|_| rng.random_range(-1.0..1.0)).collect();
    let scales = geometric_scales(5.0, config.scale_exponents.0, config.scale_exponents.1);
    let control = |x: f64| x.sin();

    let points = xs
        .par_iter()
        .map(|&x| {
            let p = difference_quotient_probe(&series, x, &scales)?;
            let c = difference_quotient_probe(&control, x, &scales)?;
            Ok(PointRow {
                x,
                quotients: p.quotients,
                oscillation: p.oscillation,
                control_oscillation: c.oscillation,
                truncation_gap: (longer.evaluate(x).value - series.evaluate(x).value).abs(),
                even: series.evaluate(x).value == series.evaluate(-x).value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tail_bound = series.tail_bound();
    let worst_gap = points.iter().map(|r| r.truncation_gap).fold(0.0, f64::max);
    let odd_points = points.iter().filter(|r| !r.even).count();
    let mut checks = vec![
        Check::at_most("max truncation gap / tail bound", worst_gap / tail_bound, 1.0),
        Check::at_most("points failing evenness", odd_points as f64, 0.0),
    ];

    let mut quotients = None;
    let mut besov_series = None;
    let mut besov_control = None;
    match config.probe {
        Probe::Quotients => {
            let osc: Vec<f64> = points.iter().map(|r| r.oscillation).collect();
            let cosc: Vec<f64> = points.iter().map(|r| r.control_oscillation).collect();
            let absq: Vec<f64> = points.iter().flat_map(|r| r.quotients.iter().map(|q| q.abs())).collect();
            let m = median(&osc);
            let mc = median(&cosc);
            let separation_factor = if mc > 0.0 { m / mc } else { f64::INFINITY };
            checks.push(Check::at_least("separation factor", separation_factor, config.separation));
            quotients = Some(QuotientSummary {
                scales: scales.clone(),
                tail_bound,
                median_oscillation: m,
                median_control_oscillation: mc,
                median_abs_quotient: median(&absq),
                separation_factor,
            });
        }
        Probe::Besov => {
            let grid = GridSpec::cube(1, -1.0, 2.0, config.cells)?;
            let ts: Vec<f64> = (config.besov_exponents.0..=config.besov_exponents.1)
                .map(|j| (-(j as f64)).exp2())
                .collect();
            besov_series = Some(besov_membership_probe(&series, &grid, config.p, &ts)?);
            let c = besov_membership_probe(&control, &grid, config.p, &ts)?;
            let slope = c.slope.unwrap_or(f64::NAN);
            checks.push(Check::at_most("|control slope - 1|", (slope - 1.0).abs(), 0.1));
            besov_control = Some(c);
        }
    }
    Ok(CounterexampleResults {
        in_counterexample_range: series.in_counterexample_range(),
        points,
        quotients,
        besov_series,
        besov_control,
        passed: all_passed(&checks),
        checks,
    })
}
