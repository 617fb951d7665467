//! Exponent calculators: the critical dimension `tau_*`, the image exponent
//! `sigma(tau)`, the slice exponents `mu_q` and their zero `beta_bar`, and the
//! quasiconformal distortion exponent.
//!
//! All arithmetic is plain `f64`; branch-agreement assertions use
//! [`BRANCH_TOL`].

use crate::error::{domain, Error, Result};

/// Tolerance for treating `tau` as equal to `tau_*`, and for the branch
/// agreement of `sigma` at the critical point.
pub const BRANCH_TOL: f64 = 1e-12;

/// Parameter tuple of a (fractional) Sobolev mapping `v = G_alpha(g)`,
/// `g in L_p(R^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistortionParams {
    pub n: u32,
    pub alpha: f64,
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub k: Option<u32>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub m: Option<u32>,
    /// Lorentz (`L_{p,1}`) data: `alpha * p >= n` suffices.
    #[cfg_attr(feature = "serde", serde(default))]
    pub lorentz_mode: bool,
}

/// Where `tau` sits relative to the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    /// `tau_* <= 0`: `sigma(tau) = tau` for every admissible `tau`.
    FullySupercritical,
    /// `tau > tau_* > 0`.
    Supercritical,
    /// `tau == tau_*`; the formula is continuous there but the N-property
    /// may fail.
    Critical,
    /// `0 < tau < tau_*`.
    Undercritical,
}

/// Value of `sigma(tau)` together with the regime it was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sigma {
    pub value: f64,
    pub regime: Regime,
}

impl DistortionParams {
    pub fn new(n: u32, alpha: f64, p: f64) -> Result<Self> {
        let params = Self {
            n,
            alpha,
            p,
            k: None,
            m: None,
            lorentz_mode: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    pub fn lorentz(mut self, on: bool) -> Self {
        self.lorentz_mode = on;
        self
    }

    /// Checks the parameter domain: `n >= 1`, `alpha > 0`, `p > 1`,
    /// `1 <= m <= n` and `k >= 1` when present.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain!("dimension n must be >= 1"));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(domain!("alpha must be a positive finite number, got {}", self.alpha));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(domain!("p must be > 1, got {}", self.p));
        }
        if let Some(m) = self.m {
            if m == 0 || m > self.n {
                return Err(domain!("m must satisfy 1 <= m <= n, got m={} n={}", m, self.n));
            }
        }
        if self.k == Some(0) {
            return Err(domain!("k must be >= 1"));
        }
        Ok(())
    }

    /// Checks `alpha * p > n`, or `alpha * p >= n` in Lorentz mode.
    pub fn check_regime(&self) -> Result<()> {
        self.validate()?;
        let ap = self.alpha * self.p;
        let n = self.n as f64;
        let ok = if self.lorentz_mode { ap >= n } else { ap > n };
        if ok {
            Ok(())
        } else {
            let op = if self.lorentz_mode { ">=" } else { ">" };
            Err(Error::Regime(alloc::format!(
                "requires alpha*p {op} n, got alpha*p = {ap} and n = {n}"
            )))
        }
    }

    pub fn tau_star(&self) -> Result<f64> {
        tau_star(self)
    }

    pub fn sigma(&self, tau: f64) -> Result<Sigma> {
        sigma(self, tau)
    }
}

/// `tau_* = n - (alpha - 1) p`. May be zero or negative.
pub fn tau_star(params: &DistortionParams) -> Result<f64> {
    params.validate()?;
    Ok(params.n as f64 - (params.alpha - 1.0) * params.p)
}

/// Undercritical branch `p tau / (alpha p - n + tau)`.
pub fn sigma_undercritical_branch(params: &DistortionParams, tau: f64) -> f64 {
    params.p * tau / (params.alpha * params.p - params.n as f64 + tau)
}

/// Image exponent `sigma(tau)`: `tau` above the critical exponent and
/// `p tau / (alpha p - n + tau)` below it. At `tau = tau_*` both branches give
/// `tau_*` and the result carries [`Regime::Critical`].
pub fn sigma(params: &DistortionParams, tau: f64) -> Result<Sigma> {
    params.check_regime()?;
    let n = params.n as f64;
    if !(tau > 0.0 && tau <= n) {
        return Err(domain!("tau must lie in (0, n] = (0, {n}], got {tau}"));
    }
    let ts = tau_star(params)?;
    if ts <= 0.0 {
        return Ok(Sigma {
            value: tau,
            regime: Regime::FullySupercritical,
        });
    }
    let scale = ts.abs().max(1.0);
    if (tau - ts).abs() <= BRANCH_TOL * scale {
        return Ok(Sigma {
            value: ts,
            regime: Regime::Critical,
        });
    }
    if tau > ts {
        Ok(Sigma {
            value: tau,
            regime: Regime::Supercritical,
        })
    } else {
        Ok(Sigma {
            value: sigma_undercritical_branch(params, tau),
            regime: Regime::Undercritical,
        })
    }
}

fn check_slice_args(n: u32, m: u32, k: u32, alpha: f64) -> Result<()> {
    if m == 0 || m > n {
        return Err(domain!("m must satisfy 1 <= m <= n, got m={m} n={n}"));
    }
    if k == 0 {
        return Err(domain!("k must be >= 1"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain!("alpha must lie in [0, 1), got {alpha}"));
    }
    Ok(())
}

/// Slice exponent `mu_q = n - m + 1 - (k + alpha)(q - m + 1)`.
///
/// Accepts `q >= m - 1` so that the endpoint identity `mu_{m-1} = n - m + 1`
/// can be evaluated. Negative values are returned as-is; downstream they
/// stand for the counting measure.
pub fn mu_q(n: u32, m: u32, k: u32, alpha: f64, q: f64) -> Result<f64> {
    check_slice_args(n, m, k, alpha)?;
    let shift = q - (m as f64 - 1.0);
    if !(shift >= 0.0) {
        return Err(domain!("q must satisfy q >= m - 1 = {}, got {q}", m as f64 - 1.0));
    }
    Ok((n - m + 1) as f64 - (k as f64 + alpha) * shift)
}

/// The zero of `mu_q`: `beta_bar = m - 1 + (n - m + 1)/(k + alpha)`.
pub fn beta_bar(n: u32, m: u32, k: u32, alpha: f64) -> Result<f64> {
    check_slice_args(n, m, k, alpha)?;
    let order = k as f64 + alpha;
    if order == 0.0 {
        return Err(domain!("k + alpha must be nonzero"));
    }
    Ok(m as f64 - 1.0 + (n - m + 1) as f64 / order)
}

/// Astala's bound `2 K t / (2 + (K - 1) t)` for the dimension of the image of
/// a `t`-dimensional set under a `K`-quasiconformal map of the plane.
pub fn astala_exponent(k: f64, t: f64) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(domain!("distortion K must be >= 1, got {k}"));
    }
    if !(t > 0.0 && t < 2.0) {
        return Err(domain!("t must lie in (0, 2), got {t}"));
    }
    Ok(2.0 * k * t / (2.0 + (k - 1.0) * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(n: u32, alpha: f64, p: f64) -> DistortionParams {
        DistortionParams::new(n, alpha, p).unwrap()
    }

    #[test]
    fn tau_star_examples() {
        assert_eq!(tau_star(&params(4, 2.0, 3.0)).unwrap(), 1.0);
        assert_eq!(tau_star(&params(1, 1.0, 2.0)).unwrap(), 1.0);
        assert_eq!(tau_star(&params(4, 3.0, 3.0)).unwrap(), -2.0);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(DistortionParams::new(2, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(DistortionParams::new(2, 0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(DistortionParams::new(0, 1.0, 2.0), Err(Error::Domain(_))));
        let bad = DistortionParams {
            n: 2,
            alpha: 1.0,
            p: 0.5,
            k: None,
            m: None,
            lorentz_mode: false,
        };
        assert!(matches!(tau_star(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn sigma_examples() {
        let pr = params(4, 2.0, 3.0);
        let s = sigma(&pr, 2.0).unwrap();
        assert_eq!(s.value, 2.0);
        assert_eq!(s.regime, Regime::Supercritical);

        let s = sigma(&pr, 0.5).unwrap();
        assert_relative_eq!(s.value, 0.6, max_relative = 1e-15);
        assert_eq!(s.regime, Regime::Undercritical);

        let s = sigma(&pr, 1.0).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.regime, Regime::Critical);
        assert!((sigma_undercritical_branch(&pr, 1.0) - 1.0).abs() <= BRANCH_TOL);
    }

    #[test]
    fn sigma_errors() {
        let pr = params(4, 2.0, 3.0);
        assert!(matches!(sigma(&pr, 0.0), Err(Error::Domain(_))));
        assert!(matches!(sigma(&pr, 4.5), Err(Error::Domain(_))));
        // alpha p = 3 < n = 4
        assert!(matches!(sigma(&params(4, 1.0, 3.0), 1.0), Err(Error::Regime(_))));
        // alpha p == n needs Lorentz mode
        let crit = params(2, 1.0, 2.0);
        assert!(matches!(sigma(&crit, 1.0), Err(Error::Regime(_))));
        assert!(sigma(&crit.lorentz(true), 1.0).is_ok());
    }

    #[test]
    fn fully_supercritical_flag() {
        let s = sigma(&params(4, 3.0, 3.0), 0.5).unwrap();
        assert_eq!(s.value, 0.5);
        assert_eq!(s.regime, Regime::FullySupercritical);
    }

    #[test]
    fn mu_q_identities() {
        // q = m - 1
        assert_eq!(mu_q(4, 2, 2, 0.5, 1.0).unwrap(), 3.0);
        // Dubovitskii line q = m with alpha = 0
        assert_eq!(mu_q(4, 1, 2, 0.0, 1.0).unwrap(), 2.0);
        // zero at beta_bar
        let b = beta_bar(4, 1, 2, 0.0).unwrap();
        assert_eq!(b, 2.0);
        assert_eq!(mu_q(4, 1, 2, 0.0, b).unwrap(), 0.0);
        for n in 1..6 {
            assert_eq!(beta_bar(n, n, 1, 0.0).unwrap(), n as f64);
        }
    }

    #[test]
    fn mu_q_errors() {
        assert!(matches!(mu_q(2, 3, 1, 0.0, 3.0), Err(Error::Domain(_))));
        assert!(matches!(mu_q(4, 2, 1, 0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(mu_q(4, 2, 0, 0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(beta_bar(4, 2, 1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn astala_examples() {
        assert_eq!(astala_exponent(1.0, 0.7).unwrap(), 0.7);
        assert_relative_eq!(astala_exponent(3.0, 1.0).unwrap(), 1.5);
        assert!(astala_exponent(5.0, 1e-9).unwrap() < 1e-7);
        assert!(astala_exponent(2.0, 2.0).is_err());
        assert!(astala_exponent(0.5, 1.0).is_err());
        assert_relative_eq!(astala_exponent(7.0, 2.0 - 1e-12).unwrap(), 2.0, max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn sigma_dominates_tau_and_is_monotone(
            n in 1u32..6,
            alpha in 0.2f64..4.0,
            extra in 0.01f64..3.0,
            t1 in 0.0001f64..1.0,
            t2 in 0.0001f64..1.0,
        ) {
            // pick p so that alpha * p > n
            let p = (n as f64 / alpha + extra).max(1.0 + extra);
            let pr = params(n, alpha, p);
            let nf = n as f64;
            let (a, b) = if t1 <= t2 { (t1 * nf, t2 * nf) } else { (t2 * nf, t1 * nf) };
            let sa = sigma(&pr, a).unwrap().value;
            let sb = sigma(&pr, b).unwrap().value;
            prop_assert!(sa >= a - 1e-12);
            prop_assert!(sa <= sb + 1e-12);
            let ts = tau_star(&pr).unwrap();
            if a > ts + 1e-9 {
                prop_assert_eq!(sa, a);
            }
            if a < ts - 1e-9 {
                prop_assert!(sa > a);
            }
        }

        #[test]
        fn mu_q_affine_decreasing(
            n in 1u32..8, mfrac in 0.0f64..1.0, k in 1u32..4, alpha in 0.0f64..0.99,
            q1 in 0.0f64..5.0, dq in 0.001f64..5.0,
        ) {
            let m = 1 + ((n - 1) as f64 * mfrac) as u32;
            let base = m as f64 - 1.0;
            let a = mu_q(n, m, k, alpha, base + q1).unwrap();
            let b = mu_q(n, m, k, alpha, base + q1 + dq).unwrap();
            prop_assert!(b < a);
            prop_assert!(((a - b) / dq - (k as f64 + alpha)).abs() < 1e-9);
            let bb = beta_bar(n, m, k, alpha).unwrap();
            prop_assert!(mu_q(n, m, k, alpha, bb).unwrap().abs() <= 1e-12);
        }

        #[test]
        fn astala_monotone(k in 1.0f64..10.0, dk in 0.0f64..5.0, t in 0.01f64..1.9, dt in 0.0f64..0.09) {
            let base = astala_exponent(k, t).unwrap();
            prop_assert!(base > 0.0 && base < 2.0);
            prop_assert!(astala_exponent(k + dk, t).unwrap() >= base - 1e-15);
            prop_assert!(astala_exponent(k, t + dt).unwrap() >= base - 1e-15);
            prop_assert!(base >= t - 1e-15);
        }
    }
}
