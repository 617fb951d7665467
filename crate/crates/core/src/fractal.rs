//! Point samples of sets, dyadic content, box-counting dimension, Cantor
//! reference sets and the `L_{p,1}` layer-cake norm.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{CubeFamily, DyadicCube, DEFAULT_ROOT_LEVEL};
use crate::error::{domain, Error, Result};
use crate::grid::GridFunction;
use crate::math::{dyadic_pow, exp2i, linear_fit};

/// Fraction of the point count at which a level is considered saturated.
pub const SATURATION_FRACTION: f64 = 0.98;

/// Default scale window for box counting.
pub const DEFAULT_LEVELS: (i32, i32) = (4, 10);

/// Provenance of a point set.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointSetMeta {
    pub generator: String,
    pub seed: u64,
}

/// Finite sample of a set `E ⊂ R^n`, `n ∈ {1, 2}`, stored flat.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    pub meta: PointSetMeta,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>, meta: PointSetMeta) -> Result<Self> {
        Self::with_root(dim, coords, meta, DEFAULT_ROOT_LEVEL)
    }

    /// Rejects points outside `[-2^L, 2^L]^n`.
    pub fn with_root(dim: usize, coords: Vec<f64>, meta: PointSetMeta, root_level: i32) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(domain!("point sets must have dimension 1 or 2, got {dim}"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(domain!("coordinate count {} is not a multiple of {dim}", coords.len()));
        }
        let bound = exp2i(root_level);
        if let Some(x) = coords.iter().find(|x| !(x.abs() <= bound)) {
            return Err(domain!("coordinate {x} lies outside the root box [-{bound}, {bound}]"));
        }
        Ok(Self { dim, coords, meta })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>], meta: PointSetMeta) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(domain!("point has {} coordinates, expected {dim}", p.len()));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, meta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Image under `f`, scalar-valued, as a 1-d point set.
    pub fn map_scalar(&self, f: impl Fn(&[f64]) -> f64, generator: String) -> Result<PointSet> {
        let coords = self.points().map(f).collect();
        PointSet::new(
            1,
            coords,
            PointSetMeta {
                generator,
                seed: self.meta.seed,
            },
        )
    }

    /// `A × {0}` embedded in the plane.
    pub fn embed_in_plane(&self) -> Result<PointSet> {
        if self.dim != 1 {
            return Err(domain!("only 1-d sets can be embedded in the plane"));
        }
        let coords = self.coords.iter().flat_map(|&x| [x, 0.0]).collect();
        PointSet::new(2, coords, self.meta.clone())
    }

    /// Distinct level-`level` cubes (half-open convention) holding a point.
    pub fn occupied_cubes(&self, level: i32) -> BTreeSet<DyadicCube> {
        self.points()
            .map(|x| DyadicCube::containing_point(x, level))
            .collect()
    }

    pub fn occupied_count(&self, level: i32) -> usize {
        let scale = exp2i(level);
        if self.dim == 1 {
            let mut keys: Vec<i64> = self
                .coords
                .iter()
                .map(|&x| libm::floor(x * scale) as i64)
                .collect();
            keys.sort_unstable();
            keys.dedup();
            keys.len()
        } else {
            let mut keys: Vec<(i64, i64)> = self
                .coords
                .chunks_exact(2)
                .map(|p| (libm::floor(p[0] * scale) as i64, libm::floor(p[1] * scale) as i64))
                .collect();
            keys.sort_unstable();
            keys.dedup();
            keys.len()
        }
    }

    /// The occupied cubes at `level` as a family weighted by `tau`.
    pub fn cover(&self, level: i32, tau: f64) -> CubeFamily {
        CubeFamily::new(tau, self.occupied_cubes(level).into_iter().collect())
    }
}

/// `sum side^s` over the distinct level-`level` cubes meeting the set: an
/// upper bound for the dyadic content at that scale.
pub fn dyadic_content(points: &PointSet, s: f64, level: i32) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain!("exponent s must be positive, got {s}"));
    }
    if level < 0 {
        return Err(domain!("level must be >= 0, got {level}"));
    }
    let w = dyadic_pow(level, s);
    let count = points.occupied_count(level);
    let mut total = 0.0;
    for _ in 0..count {
        total += w;
    }
    Ok(total)
}

/// Box-counting estimate with the scales it used.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionEstimate {
    pub value: f64,
    pub scales_used: Vec<i32>,
    /// Occupied-cube count for every requested level.
    pub levels: Vec<i32>,
    pub counts: Vec<usize>,
    pub fit_residual: f64,
    /// Levels dropped because the count was within 2% of the point count.
    pub saturated: Vec<i32>,
}

/// Least-squares slope of `log2(count)` against level.
///
/// Levels whose count reaches [`SATURATION_FRACTION`] of the point count are
/// excluded. When the count is the same on every level (a finite set that is
/// resolved everywhere) the slope is zero and saturation is not applied.
pub fn box_dimension(points: &PointSet, level_min: i32, level_max: i32) -> Result<DimensionEstimate> {
    if level_min < 0 || level_max <= level_min {
        return Err(domain!("need 0 <= level_min < level_max, got {level_min}..{level_max}"));
    }
    if points.is_empty() {
        return Err(Error::Fit("empty point set".into()));
    }
    let levels: Vec<i32> = (level_min..=level_max).collect();
    let counts: Vec<usize> = levels.iter().map(|&l| points.occupied_count(l)).collect();
    if counts.iter().all(|&c| c == counts[0]) {
        return Ok(DimensionEstimate {
            value: 0.0,
            scales_used: levels.clone(),
            levels,
            counts,
            fit_residual: 0.0,
            saturated: Vec::new(),
        });
    }
    let limit = SATURATION_FRACTION * points.len() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut used = Vec::new();
    let mut saturated = Vec::new();
    for (&l, &c) in levels.iter().zip(&counts) {
        if c as f64 >= limit {
            saturated.push(l);
        } else {
            used.push(l);
            xs.push(l as f64);
            ys.push(libm::log2(c as f64));
        }
    }
    if used.len() < 3 {
        return Err(Error::Fit(alloc::format!(
            "only {} unsaturated scales in {level_min}..={level_max}; need at least 3",
            used.len()
        )));
    }
    let (slope, _, residual) =
        linear_fit(&xs, &ys).ok_or_else(|| Error::Fit("degenerate scale set".into()))?;
    Ok(DimensionEstimate {
        value: slope,
        scales_used: used,
        levels,
        counts,
        fit_residual: residual,
        saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CantorMode {
    /// Both endpoints of every depth-`d` interval.
    Endpoints,
    /// `count` points drawn from the natural self-similar measure, each
    /// uniform inside its depth-`d` interval.
    UniformSample { count: usize },
}

/// Left endpoints of the `2^depth` intervals of the self-similar Cantor
/// construction with contraction `ratio`, and their common length.
pub fn cantor_intervals(ratio: f64, depth: u32) -> Result<(Vec<f64>, f64)> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(domain!("Cantor ratio must lie in (0, 1/2), got {ratio}"));
    }
    if depth > 20 {
        return Err(domain!("depth must be <= 20, got {depth}"));
    }
    let mut lefts = alloc::vec![0.0];
    let mut len = 1.0;
    for _ in 0..depth {
        let shift = len - len * ratio;
        let mut next = Vec::with_capacity(lefts.len() * 2);
        for &a in &lefts {
            next.push(a);
            next.push(a + shift);
        }
        lefts = next;
        len *= ratio;
    }
    Ok((lefts, len))
}

/// Cantor set with contraction `ratio`; dimension `log 2 / log(1/ratio)`.
pub fn cantor_set(ratio: f64, depth: u32, mode: CantorMode, seed: u64) -> Result<PointSet> {
    let (lefts, len) = cantor_intervals(ratio, depth)?;
    let coords = match mode {
        CantorMode::Endpoints => lefts.iter().flat_map(|&a| [a, a + len]).collect(),
        CantorMode::UniformSample { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let a = lefts[rng.random_range(0..lefts.len())];
                    a + len * rng.random::<f64>()
                })
                .collect()
        }
    };
    let tag = match mode {
        CantorMode::Endpoints => String::from("endpoints"),
        CantorMode::UniformSample { count } => alloc::format!("sample{count}"),
    };
    PointSet::new(
        1,
        coords,
        PointSetMeta {
            generator: alloc::format!("cantor:ratio={ratio}:depth={depth}:{tag}"),
            seed,
        },
    )
}

/// Exact dyadic cover of the Cantor set at `level`: the closed level-`level`
/// cubes meeting the construction intervals of the first depth whose length
/// is at most `2^-level`.
pub fn cantor_cover(ratio: f64, level: i32, tau: f64) -> Result<CubeFamily> {
    if level < 0 {
        return Err(domain!("level must be >= 0"));
    }
    let side = exp2i(-level);
    let depth = libm::ceil(libm::log(side) / libm::log(ratio)).max(0.0) as u32;
    if depth > 20 {
        return Err(domain!("level {level} needs construction depth {depth} > 20"));
    }
    let (lefts, len) = cantor_intervals(ratio, depth)?;
    let scale = exp2i(level);
    let mut cubes: BTreeSet<i64> = BTreeSet::new();
    for a in lefts {
        let lo = libm::floor(a * scale) as i64;
        let hi = (libm::ceil((a + len) * scale) as i64 - 1).max(lo);
        cubes.extend(lo..=hi);
    }
    Ok(CubeFamily::new(
        tau,
        cubes
            .into_iter()
            .map(|k| DyadicCube::new(level, alloc::vec![k]))
            .collect(),
    ))
}

/// `‖f‖_{L_{p,1}} = ∫_0^∞ |{|f| > t}|^{1/p} dt`, exact for grid functions.
///
/// With `|f|` sorted decreasingly as `a_1 >= ... >= a_N`, the distribution
/// function equals `j h^n` on `[a_{j+1}, a_j)`, so the integral is
/// `sum_j (a_j - a_{j+1}) (j h^n)^{1/p}`.
pub fn lorentz_norm_p1(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(domain!("p must be > 1, got {p}"));
    }
    let mut a: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let vol = f.cell_volume();
    let mut total = 0.0;
    for j in 0..a.len() {
        let next = a.get(j + 1).copied().unwrap_or(0.0);
        let gap = a[j] - next;
        if gap > 0.0 {
            total += gap * libm::pow((j + 1) as f64 * vol, 1.0 / p);
        }
    }
    Ok(total)
}
