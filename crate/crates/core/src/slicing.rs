//! Cover sums pairing the size of a cube with the size of its image: the
//! set function `Φ(E) = inf Σ side(D_j)^μ [diam v(D_j)]^q` over dyadic
//! covers and the Hölder splitting of such sums.

use alloc::vec::Vec;

use crate::dyadic::{CubeFamily, DyadicCube};
use crate::error::{domain, Error, Result};
use crate::fractal::PointSet;
use crate::grid::GridFunction;
use crate::math::{dyadic_pow, pow_len};
use crate::potential::image_diameter as grid_image_diameter;

/// Scalar map on `R^n` whose image diameters on dyadic cubes can be
/// measured.
pub trait Mapping {
    fn apply(&self, x: &[f64]) -> f64;

    /// Whether `x` lies where the map is defined.
    fn defined_at(&self, _x: &[f64]) -> bool {
        true
    }

    /// `max - min` over the `2^n` corners and the center of the cube.
    fn image_diameter(&self, cube: &DyadicCube) -> f64 {
        let (lo, hi) = (cube.lower_corner(), cube.upper_corner());
        let n = cube.dim();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut push = |y: f64| {
            min = min.min(y);
            max = max.max(y);
        };
        for mask in 0..1usize << n {
            let x: Vec<f64> = (0..n)
                .map(|a| if mask >> a & 1 == 1 { hi[a] } else { lo[a] })
                .collect();
            push(self.apply(&x));
        }
        push(self.apply(&cube.center()));
        max - min
    }
}

impl<F: Fn(&[f64]) -> f64> Mapping for F {
    fn apply(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Grid functions also use every cell center inside the cube.
impl Mapping for GridFunction {
    fn apply(&self, x: &[f64]) -> f64 {
        self.interpolate(x)
    }

    fn defined_at(&self, x: &[f64]) -> bool {
        self.spec().contains_point(x)
    }

    fn image_diameter(&self, cube: &DyadicCube) -> f64 {
        grid_image_diameter(self, cube)
    }
}

/// The identity of the real line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Mapping for Identity {
    fn apply(&self, x: &[f64]) -> f64 {
        x[0]
    }
}

/// `Σ [diam v(Q)]^s` over the members of `family`.
pub fn image_diameter_sum<V: Mapping + ?Sized>(family: &CubeFamily, v: &V, s: f64) -> f64 {
    family
        .cubes
        .iter()
        .map(|c| {
            let d = v.image_diameter(c);
            if d == 0.0 { 0.0 } else { pow_len(d, s) }
        })
        .sum()
}

/// Best dyadic-level value of the `Φ` sum over the requested levels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhiEstimate {
    pub value: f64,
    /// Witnessing cover (weighted by `mu_exponent`).
    pub cover: CubeFamily,
    pub mu_exponent: f64,
    pub q_exponent: f64,
    pub level: i32,
    /// `(level, Φ sum)` for every requested level.
    pub per_level: Vec<(i32, f64)>,
}

/// `Σ_j side(D_j)^μ [diam v(D_j)]^q` over the occupied level-`level` cubes.
pub fn phi_sum<V: Mapping + ?Sized>(points: &PointSet, v: &V, mu: f64, q: f64, level: i32) -> (f64, CubeFamily) {
    let cubes: Vec<DyadicCube> = points.occupied_cubes(level).into_iter().collect();
    let w = dyadic_pow(level, mu);
    let mut total = 0.0;
    for c in &cubes {
        let d = v.image_diameter(c);
        if d > 0.0 {
            total += w * pow_len(d, q);
        }
    }
    (total, CubeFamily::new(mu, cubes))
}

/// Minimum of [`phi_sum`] over `levels`: an upper bound for `Φ(E)`.
pub fn phi_estimate<V: Mapping + ?Sized>(
    points: &PointSet,
    v: &V,
    mu: f64,
    q: f64,
    levels: &[i32],
) -> Result<PhiEstimate> {
    if !(mu >= 0.0) || !(q > 0.0) {
        return Err(domain!("need mu >= 0 and q > 0, got mu = {mu}, q = {q}"));
    }
    if levels.is_empty() {
        return Err(domain!("no levels given"));
    }
    if let Some(x) = points.points().find(|x| !v.defined_at(x)) {
        return Err(domain!("point {x:?} lies outside the domain of the map"));
    }
    let mut best: Option<(f64, CubeFamily, i32)> = None;
    let mut per_level = Vec::with_capacity(levels.len());
    for &level in levels {
        let (value, cover) = phi_sum(points, v, mu, q, level);
        per_level.push((level, value));
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, cover, level));
        }
    }
    let (value, cover, level) = best.expect("levels is nonempty");
    Ok(PhiEstimate {
        value,
        cover,
        mu_exponent: mu,
        q_exponent: q,
        level,
        per_level,
    })
}

/// Both sides of
/// `Σ ℓ^μ d^q <= (Σ ℓ^τ)^{1-q/σ} (Σ d^σ)^{q/σ}` with `μ = τ(1 - q/σ)`,
/// `ℓ` the cube sides and `d` the image diameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HolderSplit {
    pub lhs: f64,
    /// `Σ ℓ^τ`.
    pub factor_tau: f64,
    /// `Σ d^σ`.
    pub factor_sigma: f64,
    pub rhs: f64,
    pub mu: f64,
}

impl HolderSplit {
    /// `lhs <= rhs (1 + rtol)`.
    pub fn holds(&self, rtol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rtol)
    }
}

/// Evaluates the Hölder splitting on a cover for `0 < q <= σ`.
pub fn holder_split<V: Mapping + ?Sized>(
    cover: &CubeFamily,
    v: &V,
    tau: f64,
    sigma: f64,
    q: f64,
) -> Result<HolderSplit> {
    if !(tau > 0.0) || !(sigma > 0.0) {
        return Err(domain!("need tau > 0 and sigma > 0, got {tau}, {sigma}"));
    }
    if !(q > 0.0 && q <= sigma) {
        return Err(domain!("q must lie in (0, sigma] = (0, {sigma}], got {q}"));
    }
    let theta = q / sigma;
    let mu = tau * (1.0 - theta);
    let mut lhs = 0.0;
    let mut factor_tau = 0.0;
    let mut factor_sigma = 0.0;
    for c in &cover.cubes {
        let d = v.image_diameter(c);
        if !d.is_finite() {
            return Err(Error::Numerical(alloc::format!("image diameter of {c} is not finite")));
        }
        factor_tau += c.side_pow(tau);
        if d > 0.0 {
            lhs += c.side_pow(mu) * pow_len(d, q);
            factor_sigma += pow_len(d, sigma);
        }
    }
    let rhs = libm::pow(factor_tau, 1.0 - theta) * libm::pow(factor_sigma, theta);
    Ok(HolderSplit {
        lhs,
        factor_tau,
        factor_sigma,
        rhs,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::{cantor_set, dyadic_content, CantorMode, PointSetMeta};
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_matches_content() {
        let e = cantor_set(1.0 / 3.0, 12, CantorMode::Endpoints, 0).unwrap();
        for q in [0.4, 0.6309, 1.0] {
            for level in 0..=10 {
                let (phi, _) = phi_sum(&e, &Identity, 0.0, q, level);
                assert_eq!(phi, dyadic_content(&e, q, level).unwrap());
            }
        }
    }

    #[test]
    fn constant_map_gives_zero() {
        let e = cantor_set(0.25, 8, CantorMode::Endpoints, 0).unwrap();
        let est = phi_estimate(&e, &|_x: &[f64]| 3.0, 0.5, 1.0, &[3, 5, 7]).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.per_level.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn holder_map_bounded_across_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let coords = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let seg = PointSet::new(1, coords, PointSetMeta::default()).unwrap();
        let gamma = 0.5;
        // Weierstrass function, Hölder of order gamma at every point
        let v = |x: &[f64]| -> f64 {
            (0..24)
                .map(|j| libm::exp2(-(j as f64) * gamma) * libm::cos(core::f64::consts::PI * libm::exp2(j as f64) * x[0] * 1.37))
                .sum()
        };
        let est = phi_estimate(&seg, &v, 0.0, 1.0 / gamma, &[4, 5, 6, 7, 8, 9]).unwrap();
        let max = est.per_level.iter().map(|p| p.1).fold(0.0, f64::max);
        let min = est.per_level.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        assert!(max <= 4.0 * min, "{:?}", est.per_level);
        assert_eq!(est.value, min);
    }

    #[test]
    fn outside_domain_rejected() {
        let spec = GridSpec::cube(1, 0.0, 1.0, 16).unwrap();
        let v = GridFunction::zeros(spec);
        let e = PointSet::new(1, alloc::vec![0.5, 1.5], PointSetMeta::default()).unwrap();
        assert!(phi_estimate(&e, &v, 0.0, 1.0, &[2]).is_err());
    }

    #[test]
    fn holder_split_inequality() {
        let e = cantor_set(1.0 / 3.0, 10, CantorMode::Endpoints, 0).unwrap();
        let v = |x: &[f64]| libm::sin(3.0 * x[0]) + x[0] * x[0];
        for level in 2..9 {
            let cover = e.cover(level, 0.63);
            for q in [0.1, 0.3, 0.5, 0.7] {
                let h = holder_split(&cover, &v, 0.63, 0.7, q).unwrap();
                assert!(h.holds(1e-12), "{h:?}");
            }
            let full = holder_split(&cover, &v, 0.63, 0.7, 0.7).unwrap();
            assert!((full.lhs - full.factor_sigma).abs() <= 1e-14 * full.lhs);
        }
        assert!(holder_split(&e.cover(3, 0.6), &v, 0.6, 0.7, 0.8).is_err());
    }
}
