//! Lacunary cosine series `e^{-x²} Σ_{m=1}^M b^{-m} ε_m cos(b^m x)` and
//! probes of their (non-)differentiability.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::math::{linear_fit, median, CompensatedSum};
use crate::potential::besov_modulus;

/// Terms used when no tolerance is requested.
pub const DEFAULT_TERMS: u32 = 20;

/// Coefficients `ε_m`. Every rule satisfies `|ε_m| <= 1`, which the tail
/// bound relies on.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Coefficients {
    /// `ε_m = m^{-e}`, `e >= 0`.
    PowerDecay(f64),
    /// `ε_m = 1`: the classical Weierstrass function.
    Unit,
}

impl Coefficients {
    fn at(&self, m: u32) -> f64 {
        match self {
            Coefficients::PowerDecay(e) => libm::pow(m as f64, -e),
            Coefficients::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LacunarySeries {
    pub sigma: f64,
    pub base: f64,
    pub coefficients: Coefficients,
    pub envelope: bool,
    pub terms: u32,
}

/// Value with a certified bound on `|value - f(x)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Evaluation {
    pub value: f64,
    pub error_bound: f64,
}

impl LacunarySeries {
    /// `f_σ(x) = e^{-x²} Σ 5^{-m} m^{-σ} cos(5^m x)` with [`DEFAULT_TERMS`].
    pub fn f_sigma(sigma: f64) -> Result<Self> {
        Self::new(sigma, 5.0, Coefficients::PowerDecay(sigma), true, DEFAULT_TERMS)
    }

    pub fn new(sigma: f64, base: f64, coefficients: Coefficients, envelope: bool, terms: u32) -> Result<Self> {
        if !(base > 1.0) || !base.is_finite() {
            return Err(domain!("base must be > 1, got {base}"));
        }
        if let Coefficients::PowerDecay(e) = coefficients {
            if !(e >= 0.0) {
                return Err(domain!("coefficient exponent must be >= 0, got {e}"));
            }
        }
        if terms == 0 {
            return Err(domain!("at least one term is needed"));
        }
        Ok(Self {
            sigma,
            base,
            coefficients,
            envelope,
            terms,
        })
    }

    /// Whether `1/3 < σ < 1/2`, the range of the counterexample. Other
    /// values give a valid generic series.
    pub fn in_counterexample_range(&self) -> bool {
        self.sigma > 1.0 / 3.0 && self.sigma < 0.5
    }

    /// Smallest truncation with tail bound at most `tol`.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(domain!("tolerance must be positive, got {tol}"));
        }
        let mut m = 1;
        while tail(self.base, m) > tol {
            m += 1;
            if m > 2000 {
                return Err(domain!("tolerance {tol} is below what double precision can certify"));
            }
        }
        self.terms = m;
        Ok(self)
    }

    pub fn with_terms(mut self, terms: u32) -> Self {
        self.terms = terms.max(1);
        self
    }

    /// `sup_x |f - f_M| <= Σ_{m>M} b^{-m} = b^{-M}/(b-1)`.
    pub fn tail_bound(&self) -> f64 {
        tail(self.base, self.terms)
    }

    /// Ascending compensated sum times the envelope, with the tail bound
    /// plus a rounding allowance as certificate.
    pub fn evaluate(&self, x: f64) -> Evaluation {
        let mut acc = CompensatedSum::new();
        let mut weight = 1.0;
        let mut freq = 1.0;
        let mut abs_sum = 0.0;
        for m in 1..=self.terms {
            weight /= self.base;
            freq *= self.base;
            let t = weight * self.coefficients.at(m) * libm::cos(freq * x);
            abs_sum += t.abs();
            acc.add(t);
        }
        let env = if self.envelope { libm::exp(-x * x) } else { 1.0 };
        // cos of an argument carrying relative error u is off by about
        // |freq x| u; after the weight b^{-m} that is |x| u per term
        let u = f64::EPSILON;
        let rounding = (4.0 * abs_sum + self.terms as f64 * (x.abs() + 1.0)) * u;
        Evaluation {
            value: env * acc.value(),
            error_bound: env * (self.tail_bound() + rounding),
        }
    }
}

fn tail(base: f64, terms: u32) -> f64 {
    libm::pow(base, -(terms as f64)) / (base - 1.0)
}

/// Real function of one variable with a certified evaluation error.
pub trait RealFunction {
    fn eval(&self, x: f64) -> f64;

    fn error_bound(&self, _x: f64) -> f64 {
        0.0
    }
}

impl RealFunction for LacunarySeries {
    fn eval(&self, x: f64) -> f64 {
        self.evaluate(x).value
    }

    fn error_bound(&self, x: f64) -> f64 {
        self.evaluate(x).error_bound
    }
}

impl<F: Fn(f64) -> f64> RealFunction for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }

    fn error_bound(&self, x: f64) -> f64 {
        4.0 * f64::EPSILON * self(x).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuotientProbe {
    pub x: f64,
    pub scales: Vec<f64>,
    pub quotients: Vec<f64>,
    /// `max - min` of the quotients over the final half of the scales.
    pub oscillation: f64,
}

/// Quotients whose evaluation error may exceed this fraction of a unit
/// slope are refused.
pub const QUOTIENT_PRECISION: f64 = 1e-3;

/// `(f(x+h_j) - f(x))/h_j` for nonzero scales of nonincreasing magnitude
/// (signs may alternate).
pub fn difference_quotient_probe<F: RealFunction + ?Sized>(f: &F, x: f64, scales: &[f64]) -> Result<QuotientProbe> {
    if scales.is_empty() {
        return Err(domain!("no scales given"));
    }
    for w in scales.windows(2) {
        if w[1].abs() > w[0].abs() {
            return Err(domain!("scale magnitudes must be nonincreasing"));
        }
    }
    if scales.iter().any(|h| *h == 0.0 || !h.is_finite()) {
        return Err(domain!("scales must be finite and nonzero"));
    }
    let f0 = f.eval(x);
    let e0 = f.error_bound(x);
    let mut quotients = Vec::with_capacity(scales.len());
    for &h in scales {
        let err = (e0 + f.error_bound(x + h)) / h.abs();
        if err > QUOTIENT_PRECISION {
            return Err(Error::Precision(alloc::format!(
                "evaluation error allows a quotient error of {err:e} at scale {h:e}"
            )));
        }
        quotients.push((f.eval(x + h) - f0) / h);
    }
    let tail = &quotients[quotients.len() / 2..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(QuotientProbe {
        x,
        scales: scales.to_vec(),
        quotients,
        oscillation: max - min,
    })
}

/// Median oscillation over the probe points.
pub fn median_oscillation<F: RealFunction + ?Sized>(f: &F, points: &[f64], scales: &[f64]) -> Result<f64> {
    let osc = points
        .iter()
        .map(|&x| difference_quotient_probe(f, x, scales).map(|p| p.oscillation))
        .collect::<Result<Vec<_>>>()?;
    Ok(median(&osc))
}

/// `h_j = b^{-j}` for `j` in `first..=last`.
pub fn geometric_scales(base: f64, first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|j| libm::pow(base, -(j as f64))).collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BesovProbe {
    pub scales: Vec<f64>,
    /// `‖Ω^1_f(·,t)‖_{L^p}` per scale.
    pub norms: Vec<f64>,
    /// Slope of `log ‖Ω‖` against `log t`; `None` when some norm vanishes.
    pub slope: Option<f64>,
}

/// Samples `f` on `grid` and fits the decay of the first-order modulus.
/// Scales must be multiples of the grid step.
pub fn besov_membership_probe<F: RealFunction + ?Sized>(
    f: &F,
    grid: &GridSpec,
    p: f64,
    scales: &[f64],
) -> Result<BesovProbe> {
    if grid.dim != 1 {
        return Err(domain!("the probe samples functions of one variable"));
    }
    if !(p >= 1.0) {
        return Err(domain!("p must be >= 1, got {p}"));
    }
    if scales.len() < 2 {
        return Err(domain!("at least two scales are needed"));
    }
    let v = GridFunction::from_fn(grid.clone(), |x| f.eval(x[0]));
    let norms = scales
        .iter()
        .map(|&t| besov_modulus(&v, 1, t).map(|b| b.lp_norm(p)))
        .collect::<Result<Vec<_>>>()?;
    let slope = if norms.iter().all(|n| *n > 0.0) {
        let xs: Vec<f64> = scales.iter().map(|t| libm::log(*t)).collect();
        let ys: Vec<f64> = norms.iter().map(|n| libm::log(*n)).collect();
        linear_fit(&xs, &ys).map(|fit| fit.0)
    } else {
        None
    };
    Ok(BesovProbe {
        scales: scales.to_vec(),
        norms,
        slope,
    })
}
