use alloc::vec::Vec;

use super::convolve::{bessel_potential, bessel_potential_with, riesz_potential_any_order, riesz_potential_at};
use super::kernel::KernelTable;
use super::maximal::{maximal, maximal_any_order};
use crate::dyadic::DyadicCube;
use crate::error::{domain, Error, Result};
use crate::grid::{GridFunction, GridSpec};

/// Which image-diameter bound is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DiamMode {
    /// `‖Mg‖_{L_p(Q)} r^{α-n/p} + r^{1-n} ∫_Q I_{α-1}|g|`; needs `α > 1`, `αp > n`.
    Riesz,
    /// `‖Mg‖_{L_p(Q)} r^{α-n/p} + r^{1-n-θ} ∫_Q M_{α-1+θ} g`; needs `αp > n`,
    /// `α + θ >= 1`.
    Maximal,
    /// As `Maximal` with `‖Mg‖_{L_{p,1}(Q)}`; needs `αp >= n`.
    Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiamBound {
    /// Image diameter of `Q` under `v = G_α g`.
    pub lhs: f64,
    /// Bracketed sum of the bound, without its constant.
    pub rhs: f64,
    pub ratio: f64,
}

/// Fields shared by all cubes checked against one `g`: `v`, `Mg` and the
/// second-term integrand.
#[derive(Debug, Clone)]
pub struct DiamBoundContext {
    pub alpha: f64,
    pub p: f64,
    pub theta: f64,
    pub mode: DiamMode,
    pub v: GridFunction,
    pub mg: GridFunction,
    pub aux: GridFunction,
}

fn check_mode(n: usize, alpha: f64, p: f64, theta: f64, mode: DiamMode) -> Result<()> {
    let n = n as f64;
    if !(p > 1.0) || !(alpha > 0.0) {
        return Err(domain!("need p > 1 and alpha > 0, got p = {p}, alpha = {alpha}"));
    }
    let regime = |msg: &str| Err(Error::Regime(alloc::format!("{msg} (n = {n}, alpha = {alpha}, p = {p}, theta = {theta})")));
    match mode {
        DiamMode::Riesz => {
            if !(alpha > 1.0) {
                return regime("Riesz mode needs alpha > 1");
            }
            if !(alpha * p > n) {
                return regime("Riesz mode needs alpha p > n");
            }
        }
        DiamMode::Maximal | DiamMode::Lorentz => {
            if !(theta > 0.0) || !(alpha + theta >= 1.0) {
                return regime("maximal modes need theta > 0 and alpha + theta >= 1");
            }
            if mode == DiamMode::Maximal && !(alpha * p > n) {
                return regime("maximal mode needs alpha p > n");
            }
            if mode == DiamMode::Lorentz && !(alpha * p >= n) {
                return regime("Lorentz mode needs alpha p >= n");
            }
        }
    }
    Ok(())
}

impl DiamBoundContext {
    pub fn new(g: &GridFunction, alpha: f64, p: f64, theta: f64, mode: DiamMode) -> Result<Self> {
        check_mode(g.dim(), alpha, p, theta, mode)?;
        let v = bessel_potential(g, alpha)?;
        Self::assemble(g, v, alpha, p, theta, mode)
    }

    /// Uses a prebuilt Bessel table for `v`.
    pub fn with_table(
        g: &GridFunction,
        table: &KernelTable,
        p: f64,
        theta: f64,
        mode: DiamMode,
    ) -> Result<Self> {
        let alpha = table.spec.order;
        check_mode(g.dim(), alpha, p, theta, mode)?;
        let v = bessel_potential_with(g, table)?;
        Self::assemble(g, v, alpha, p, theta, mode)
    }

    fn assemble(g: &GridFunction, v: GridFunction, alpha: f64, p: f64, theta: f64, mode: DiamMode) -> Result<Self> {
        let mg = maximal(g, 0.0)?;
        let aux = match mode {
            DiamMode::Riesz => riesz_potential_any_order(&g.abs(), alpha - 1.0)?,
            _ => maximal_any_order(g, alpha - 1.0 + theta)?,
        };
        Ok(Self {
            alpha,
            p,
            theta,
            mode,
            v,
            mg,
            aux,
        })
    }

    /// Evaluates both sides on `Q`.
    pub fn check(&self, cube: &DyadicCube) -> Result<DiamBound> {
        let spec = self.v.spec();
        if cube.dim() != spec.dim || !spec.contains_cube(cube) {
            return Err(domain!("cube {cube} is not inside the grid box"));
        }
        let r = cube.side();
        if r > 1.0 {
            return Err(domain!("cube side must be <= 1, got {r}"));
        }
        let n = spec.dim as f64;
        let lhs = image_diameter(&self.v, cube);
        let (lo, hi) = (cube.lower_corner(), cube.upper_corner());
        let first_norm = match self.mode {
            DiamMode::Lorentz => restricted_lorentz(&self.mg, &spec, &lo, &hi, self.p),
            _ => libm::pow(self.mg.integrate_box_pow(&lo, &hi, self.p), 1.0 / self.p),
        };
        let first = first_norm * libm::pow(r, self.alpha - n / self.p);
        let second_scale = match self.mode {
            DiamMode::Riesz => libm::pow(r, 1.0 - n),
            _ => libm::pow(r, 1.0 - n - self.theta),
        };
        let second = second_scale * self.aux.integrate_box(&lo, &hi);
        let rhs = first + second;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Ok(DiamBound { lhs, rhs, ratio })
    }
}

/// `max - min` of `v` over the cell centers in `Q` and the interpolated
/// values at the corners and center of `Q`.
pub(crate) fn image_diameter(v: &GridFunction, cube: &DyadicCube) -> f64 {
    let spec = v.spec();
    let (lo, hi) = (cube.lower_corner(), cube.upper_corner());
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut push = |x: f64| {
        min = min.min(x);
        max = max.max(x);
    };
    for idx in spec.cells_with_center_in(&lo, &hi) {
        push(v.values()[idx]);
    }
    let corners = 1usize << spec.dim;
    for mask in 0..corners {
        let x: Vec<f64> = (0..spec.dim)
            .map(|a| if mask >> a & 1 == 1 { hi[a] } else { lo[a] })
            .collect();
        push(v.interpolate(&x));
    }
    push(v.interpolate(&cube.center()));
    max - min
}

/// `‖f 1_{[lo,hi]}‖_{L_{p,1}}` with partial cells weighted by their overlap.
fn restricted_lorentz(f: &GridFunction, spec: &GridSpec, lo: &[f64], hi: &[f64], p: f64) -> f64 {
    let mut cells: Vec<(f64, f64)> = spec
        .box_weights(lo, hi)
        .into_iter()
        .map(|(i, w)| (f.values()[i].abs(), w))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut total = 0.0;
    let mut measure = 0.0;
    for j in 0..cells.len() {
        measure += cells[j].1;
        let next = cells.get(j + 1).map_or(0.0, |c| c.0);
        total += (cells[j].0 - next) * libm::pow(measure, 1.0 / p);
    }
    total
}

/// One-shot form of [`DiamBoundContext::check`].
pub fn diam_bound_check(
    g: &GridFunction,
    cube: &DyadicCube,
    alpha: f64,
    p: f64,
    theta: f64,
    mode: DiamMode,
) -> Result<DiamBound> {
    DiamBoundContext::new(g, alpha, p, theta, mode)?.check(cube)
}

/// `(g 1_{2Q}, g 1_{R^n \ 2Q})`, cells assigned by their centers.
pub fn split_local_far(g: &GridFunction, cube: &DyadicCube) -> Result<(GridFunction, GridFunction)> {
    let spec = g.spec();
    let (lo, hi) = double_cube(cube);
    for a in 0..spec.dim {
        if lo[a] < spec.corner[a] || hi[a] > spec.corner[a] + spec.side {
            return Err(domain!("the double of {cube} escapes the grid box"));
        }
    }
    let mut local = alloc::vec![0.0; g.len()];
    let mut far = g.values().to_vec();
    for idx in spec.cells_with_center_in(&lo, &hi) {
        local[idx] = far[idx];
        far[idx] = 0.0;
    }
    Ok((g.with_values(local)?, g.with_values(far)?))
}

fn double_cube(cube: &DyadicCube) -> (Vec<f64>, Vec<f64>) {
    let r = cube.side();
    let c = cube.center();
    (c.iter().map(|x| x - r).collect(), c.iter().map(|x| x + r).collect())
}

/// Both sides of `∫_{2Q} g(y)|x-y|^{α-n} dy <= ∫_Q Mg(y)|x-y|^{α-n} dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocalPotentialRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Local-potential comparison at `x ∈ Q` for `|g|`, `0 < alpha < n`. `mg`
/// is `M|g|` on the same grid (pass `None` to compute it).
pub fn local_potential_ratio(
    g: &GridFunction,
    mg: Option<&GridFunction>,
    cube: &DyadicCube,
    x: &[f64],
    alpha: f64,
) -> Result<LocalPotentialRatio> {
    if !cube.contains_point(x) {
        return Err(domain!("point must lie in {cube}"));
    }
    let abs = g.abs();
    let owned;
    let mg = match mg {
        Some(m) => m,
        None => {
            owned = maximal(&abs, 0.0)?;
            &owned
        }
    };
    let (local, _) = split_local_far(&abs, cube)?;
    let spec = g.spec();
    let mut inner = alloc::vec![0.0; g.len()];
    for idx in spec.cells_with_center_in(&cube.lower_corner(), &cube.upper_corner()) {
        inner[idx] = mg.values()[idx];
    }
    let lhs = riesz_potential_at(&local, alpha, x)?;
    let rhs = riesz_potential_at(&g.with_values(inner)?, alpha, x)?;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(LocalPotentialRatio { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_g(cells: usize, seed: u64) -> GridFunction {
        let spec = GridSpec::cube(1, -2.0, 4.0, cells).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..cells).map(|_| rng.random_range(-1.0..1.0)).collect();
        GridFunction::new(spec, vals).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_ratio() {
        let g = random_g(128, 0).scale(0.0);
        let q = DyadicCube::new(2, vec![1]);
        for mode in [DiamMode::Riesz, DiamMode::Maximal, DiamMode::Lorentz] {
            let b = diam_bound_check(&g, &q, 2.0, 3.0, 0.5, mode).unwrap();
            assert_eq!(b.lhs, 0.0);
            assert_eq!(b.ratio, 0.0);
        }
    }

    #[test]
    fn ratios_bounded_and_positive() {
        let g = random_g(256, 4);
        let ctx = DiamBoundContext::new(&g, 2.0, 3.0, 0.5, DiamMode::Riesz).unwrap();
        for level in 2..6 {
            let q = DyadicCube::new(level, vec![1]);
            let b = ctx.check(&q).unwrap();
            assert!(b.rhs > 0.0 && b.ratio.is_finite(), "{b:?}");
        }
        assert!(ctx.check(&DyadicCube::new(0, vec![5])).is_err());
    }

    #[test]
    fn translation_invariance() {
        // shift by 32 cells = 0.5 = two level-2 cubes
        let cells = 256;
        let g = random_g(cells, 7);
        let mut shifted = vec![0.0; cells];
        let mut base = vec![0.0; cells];
        base[64..160].copy_from_slice(&g.values()[64..160]);
        shifted[96..192].copy_from_slice(&g.values()[64..160]);
        let a = g.with_values(base).unwrap();
        let b = g.with_values(shifted).unwrap();
        let q = DyadicCube::new(3, vec![2]);
        let q2 = DyadicCube::new(3, vec![6]);
        let ra = diam_bound_check(&a, &q, 2.0, 3.0, 0.5, DiamMode::Maximal).unwrap();
        let rb = diam_bound_check(&b, &q2, 2.0, 3.0, 0.5, DiamMode::Maximal).unwrap();
        assert!((ra.ratio - rb.ratio).abs() < 1e-9 * ra.ratio, "{ra:?} {rb:?}");
    }

    #[test]
    fn hypotheses() {
        let g = random_g(64, 1);
        assert!(matches!(DiamBoundContext::new(&g, 0.9, 3.0, 0.5, DiamMode::Riesz), Err(Error::Regime(_))));
        assert!(DiamBoundContext::new(&g, 0.3, 3.0, 0.5, DiamMode::Maximal).is_err());
        assert!(DiamBoundContext::new(&g, 0.5, 2.0, 0.6, DiamMode::Lorentz).is_ok());
    }

    #[test]
    fn split_partitions() {
        let g = random_g(64, 2);
        let q = DyadicCube::new(2, vec![1]);
        let (a, b) = split_local_far(&g, &q).unwrap();
        for i in 0..g.len() {
            assert_eq!(a.values()[i] + b.values()[i], g.values()[i]);
            assert!(a.values()[i] == 0.0 || b.values()[i] == 0.0);
        }
        assert!(split_local_far(&g, &DyadicCube::new(-1, vec![-1])).is_err());
        let inside = g.with_values((0..64).map(|i| if (28..40).contains(&i) { 1.0 } else { 0.0 }).collect()).unwrap();
        let (l, f) = split_local_far(&inside, &DyadicCube::new(1, vec![0])).unwrap();
        assert_eq!(l, inside);
        assert!(f.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn local_potential_bound_holds() {
        let g = random_g(256, 9).abs();
        let q = DyadicCube::new(3, vec![3]);
        let r = local_potential_ratio(&g, None, &q, &[0.4], 0.5).unwrap();
        assert!(r.ratio > 0.0 && r.ratio < 10.0, "{r:?}");
    }
}
