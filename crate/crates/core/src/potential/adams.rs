use super::convolve::{convolve, riesz_potential};
use super::kernel::{KernelKind, KernelTable};
use super::maximal::maximal;
use crate::dyadic::{CubeMeasure, PiecewiseUniform};
use crate::error::{domain, Error, Result};
use crate::fractal::lorentz_norm_p1;
use crate::grid::GridFunction;

/// Which trace inequality the ratio measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AdamsMode {
    /// `∫|I_α g|^s dμ ≤ C |||μ|||_β ‖g‖_p^s`, `β = (s/p)(n - αp)`, `s > p`.
    Riesz,
    /// Same with `M_α g`, `s >= p`.
    Maximal,
    /// `∫|I_α g|^p dμ ≤ C |||μ|||_β ‖g‖_{L_{p,1}}^p`, `β = n - αp`.
    Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamsRatio {
    pub lhs: f64,
    pub mu_norm: f64,
    /// `‖g‖^s` in the norm of the mode.
    pub g_norm_pow: f64,
    pub beta: f64,
    pub ratio: f64,
}

/// `∫ |f|^s dμ` for the piecewise-constant extension of `f`.
pub fn integrate_pow(f: &GridFunction, mu: &PiecewiseUniform, s: f64) -> f64 {
    mu.pieces()
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|(c, d)| d * f.integrate_cube_pow(c, s))
        .sum()
}

fn check_hypotheses(n: usize, alpha: f64, p: f64, s: f64, mode: AdamsMode) -> Result<f64> {
    let n = n as f64;
    if !(p > 1.0) {
        return Err(domain!("p must be > 1, got {p}"));
    }
    if !(alpha > 0.0) {
        return Err(domain!("alpha must be positive, got {alpha}"));
    }
    if !(n - alpha * p > 0.0) {
        return Err(Error::Regime(alloc::format!(
            "the trace inequality needs n - alpha p > 0; here n = {n}, alpha p = {}",
            alpha * p
        )));
    }
    match mode {
        AdamsMode::Riesz if !(s > p) => Err(domain!("Riesz mode needs s > p, got s = {s}, p = {p}")),
        AdamsMode::Maximal if !(s >= p) => {
            Err(domain!("maximal mode needs s >= p, got s = {s}, p = {p}"))
        }
        AdamsMode::Lorentz if s != p => Err(domain!("Lorentz mode needs s = p, got s = {s}, p = {p}")),
        AdamsMode::Lorentz => Ok(n - alpha * p),
        _ => Ok(s / p * (n - alpha * p)),
    }
}

/// `LHS / (|||μ|||_β ‖g‖^s)` for the selected mode. Returns ratio 0 when
/// `g = 0`.
pub fn adams_ratio<M: AsRef<PiecewiseUniform>>(
    g: &GridFunction,
    mu: &M,
    alpha: f64,
    p: f64,
    s: f64,
    mode: AdamsMode,
) -> Result<AdamsRatio> {
    check_hypotheses(g.dim(), alpha, p, s, mode)?;
    let field = match mode {
        AdamsMode::Maximal => maximal(g, alpha)?,
        _ => riesz_potential(g, alpha)?,
    };
    finish(g, &field, mu.as_ref(), alpha, p, s, mode)
}

/// [`adams_ratio`] in the Riesz or Lorentz mode with a prebuilt Riesz table
/// of order `alpha`.
pub fn adams_ratio_with_table<M: AsRef<PiecewiseUniform>>(
    g: &GridFunction,
    mu: &M,
    table: &KernelTable,
    p: f64,
    s: f64,
    mode: AdamsMode,
) -> Result<AdamsRatio> {
    if table.spec.kind != KernelKind::Riesz || mode == AdamsMode::Maximal {
        return Err(domain!("a Riesz table serves only the Riesz and Lorentz modes"));
    }
    let alpha = table.spec.order;
    check_hypotheses(g.dim(), alpha, p, s, mode)?;
    let field = convolve(g, table)?;
    finish(g, &field, mu.as_ref(), alpha, p, s, mode)
}

fn finish(
    g: &GridFunction,
    field: &GridFunction,
    mu: &PiecewiseUniform,
    alpha: f64,
    p: f64,
    s: f64,
    mode: AdamsMode,
) -> Result<AdamsRatio> {
    let beta = check_hypotheses(g.dim(), alpha, p, s, mode)?;
    if mu.dim() != g.dim() {
        return Err(domain!("measure dimension {} != grid dimension {}", mu.dim(), g.dim()));
    }
    let lhs = integrate_pow(field, mu, s);
    let mu_norm = mu.norm_beta(beta)?;
    let g_norm_pow = match mode {
        AdamsMode::Lorentz => libm::pow(lorentz_norm_p1(g, p)?, s),
        _ => libm::pow(g.lp_norm(p), s),
    };
    let ratio = if lhs == 0.0 {
        0.0
    } else {
        let den = mu_norm * g_norm_pow;
        if !(den > 0.0) {
            return Err(Error::Numerical(alloc::format!(
                "zero denominator with nonzero left side {lhs}"
            )));
        }
        lhs / den
    };
    Ok(AdamsRatio {
        lhs,
        mu_norm,
        g_norm_pow,
        beta,
        ratio,
    })
}
