//! Dyadic cubes, finite cube families, the regularization that enforces the
//! packing inequality, and the Frostman-type measures built on regular
//! families.
//!
//! A dyadic cube of level `l` with coordinates `k` is
//! `prod_i [k_i 2^-l, (k_i + 1) 2^-l]`. All cube arithmetic is on integers;
//! floating point only enters through the weights `side^tau`.
//!
//! Families live inside the root box `[-2^L, 2^L]^n` (default `L = 4`). The
//! root box is the union of the `2^n` dyadic cubes of level `-L` adjacent to
//! the origin, so every member has an ancestor chain that ends at level `-L`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{domain, Error, Result};
use crate::math::{dyadic_pow, exp2i};

/// Default root box exponent: cubes live in `[-16, 16]^n`.
pub const DEFAULT_ROOT_LEVEL: i32 = 4;

/// Relative slack applied when re-verifying the packing inequality with
/// independently summed weights.
pub const PACKING_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DyadicCube {
    pub level: i32,
    pub coords: Vec<i64>,
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(level={}, k=", self.level)?;
        f.debug_list().entries(self.coords.iter()).finish()?;
        write!(f, ")")
    }
}

impl DyadicCube {
    pub fn new(level: i32, coords: Vec<i64>) -> Self {
        Self { level, coords }
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(0, alloc::vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Side length `2^{-level}`, exact.
    pub fn side(&self) -> f64 {
        exp2i(-self.level)
    }

    /// `side^s`.
    pub fn side_pow(&self, s: f64) -> f64 {
        dyadic_pow(self.level, s)
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        let side = self.side();
        self.coords.iter().map(|&k| k as f64 * side).collect()
    }

    pub fn upper_corner(&self) -> Vec<f64> {
        let side = self.side();
        self.coords.iter().map(|&k| (k + 1) as f64 * side).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let side = self.side();
        self.coords.iter().map(|&k| (k as f64 + 0.5) * side).collect()
    }

    /// Euclidean diameter `sqrt(n) * side`.
    pub fn diameter(&self) -> f64 {
        libm::sqrt(self.dim() as f64) * self.side()
    }

    pub fn parent(&self) -> Self {
        Self::new(self.level - 1, self.coords.iter().map(|k| k >> 1).collect())
    }

    /// Ancestor at `level` (which must not be finer than `self.level`).
    pub fn ancestor(&self, level: i32) -> Option<Self> {
        if level > self.level {
            return None;
        }
        let shift = (self.level - level) as u32;
        let coords = if shift >= 63 {
            self.coords.iter().map(|&k| if k < 0 { -1 } else { 0 }).collect()
        } else {
            self.coords.iter().map(|k| k >> shift).collect()
        };
        Some(Self::new(level, coords))
    }

    /// The `2^n` children, in lexicographic order of coordinates.
    pub fn children(&self) -> Vec<Self> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                let coords = self
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| 2 * k + ((mask >> (n - 1 - i)) & 1) as i64)
                    .collect();
                Self::new(self.level + 1, coords)
            })
            .collect()
    }

    /// Closed containment `other ⊆ self`.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        other.dim() == self.dim()
            && other
                .ancestor(self.level)
                .is_some_and(|a| a.coords == self.coords)
    }

    /// True when the interiors intersect, which for dyadic cubes means one
    /// contains the other.
    pub fn overlaps(&self, other: &DyadicCube) -> bool {
        self.contains(other) || other.contains(self)
    }

    /// Containment of the closed cube in the root box `[-2^L, 2^L]^n`.
    pub fn within_root(&self, root_level: i32) -> bool {
        if self.level < -root_level {
            return false;
        }
        let shift = (root_level + self.level) as u32;
        if shift >= 62 {
            return false;
        }
        let bound = 1i64 << shift;
        self.coords.iter().all(|&k| k >= -bound && k < bound)
    }

    /// Closed-cube membership of a point.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        let side = self.side();
        x.len() == self.dim()
            && self.coords.iter().zip(x).all(|(&k, &xi)| {
                let lo = k as f64 * side;
                xi >= lo && xi <= lo + side
            })
    }

    /// The level-`level` cube containing `x` under the half-open convention
    /// `[k 2^-l, (k+1) 2^-l)`.
    pub fn containing_point(x: &[f64], level: i32) -> Self {
        let scale = exp2i(level);
        Self::new(level, x.iter().map(|&xi| libm::floor(xi * scale) as i64).collect())
    }

    /// Iterator over `self` and its ancestors down to `min_level` (inclusive).
    pub fn ancestors_inclusive(&self, min_level: i32) -> impl Iterator<Item = DyadicCube> + '_ {
        (min_level..=self.level)
            .rev()
            .filter_map(move |l| self.ancestor(l))
    }
}

/// Finite multiset of dyadic cubes weighted by the exponent `tau`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CubeFamily {
    pub tau: f64,
    pub cubes: Vec<DyadicCube>,
}

impl CubeFamily {
    pub fn new(tau: f64, cubes: Vec<DyadicCube>) -> Self {
        Self { tau, cubes }
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    /// Common dimension of the members; `None` for an empty family.
    pub fn dim(&self) -> Option<usize> {
        self.cubes.first().map(DyadicCube::dim)
    }

    /// `sum_i side(Q_i)^tau`, counting multiplicity.
    pub fn tau_weight(&self) -> f64 {
        self.cubes.iter().map(|c| c.side_pow(self.tau)).sum()
    }

    /// Checks `tau > 0`, a common dimension, and membership in the root box.
    pub fn validate(&self, root_level: i32) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(domain!("tau must be positive, got {}", self.tau));
        }
        let Some(dim) = self.dim() else {
            return Ok(());
        };
        if dim == 0 {
            return Err(domain!("cubes must have dimension >= 1"));
        }
        for c in &self.cubes {
            if c.dim() != dim {
                return Err(domain!("mixed cube dimensions: {} vs {}", c.dim(), dim));
            }
            if !c.within_root(root_level) {
                return Err(domain!("{c} lies outside the root box [-2^{root_level}, 2^{root_level}]^n"));
            }
        }
        Ok(())
    }

    /// Sum of member weights inside every dyadic cube that contains a
    /// member, down to the root level. Those are the only cubes where the
    /// packing sum is nonzero.
    pub fn packing_sums(&self, root_level: i32) -> BTreeMap<DyadicCube, f64> {
        let mut sums: BTreeMap<DyadicCube, f64> = BTreeMap::new();
        for c in &self.cubes {
            let w = c.side_pow(self.tau);
            for a in c.ancestors_inclusive(-root_level) {
                *sums.entry(a).or_insert(0.0) += w;
            }
        }
        sums
    }

    /// Exhaustive check of the packing inequality
    /// `side(Q)^tau >= sum_{Q_j ⊆ Q} side(Q_j)^tau` over every dyadic `Q`.
    pub fn check_packing(&self, root_level: i32) -> Result<()> {
        self.validate(root_level)?;
        for (cube, weight) in self.packing_sums(root_level) {
            let bound = cube.side_pow(self.tau);
            if weight > bound * (1.0 + PACKING_RTOL) {
                return Err(Error::NotRegular {
                    cube,
                    weight,
                    bound,
                });
            }
        }
        Ok(())
    }

    /// First pair of members with intersecting interiors (duplicates count).
    pub fn find_overlap(&self) -> Option<(DyadicCube, DyadicCube)> {
        let mut seen: BTreeSet<&DyadicCube> = BTreeSet::new();
        let min_level = self.cubes.iter().map(|c| c.level).min()?;
        for c in &self.cubes {
            if !seen.insert(c) {
                return Some((c.clone(), c.clone()));
            }
        }
        for c in &self.cubes {
            for a in c.ancestors_inclusive(min_level).skip(1) {
                if seen.contains(&a) {
                    return Some((a, c.clone()));
                }
            }
        }
        None
    }

    /// Whether the closed union of members covers `cube`.
    pub fn covers(&self, cube: &DyadicCube) -> bool {
        let set: BTreeSet<&DyadicCube> = self.cubes.iter().collect();
        let max_level = self.cubes.iter().map(|c| c.level).max();
        let min_level = self.cubes.iter().map(|c| c.level).min();
        match (min_level, max_level) {
            (Some(lo), Some(hi)) => covers_rec(&set, cube, lo, hi),
            _ => false,
        }
    }

    /// Whether every member of `other` is covered by `self`.
    pub fn covers_family(&self, other: &CubeFamily) -> bool {
        other.cubes.iter().all(|c| self.covers(c))
    }
}

fn covers_rec(set: &BTreeSet<&DyadicCube>, cube: &DyadicCube, min_level: i32, max_level: i32) -> bool {
    if cube
        .ancestors_inclusive(min_level.min(cube.level))
        .any(|a| set.contains(&a))
    {
        return true;
    }
    if cube.level >= max_level {
        return false;
    }
    cube.children()
        .iter()
        .all(|c| covers_rec(set, c, min_level, max_level))
}

/// A family satisfying the packing inequality; constructed only through
/// [`regularize`] or a checked conversion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegularFamily(CubeFamily);

impl RegularFamily {
    /// Verifies the packing inequality (which also rules out overlaps).
    pub fn try_new(family: CubeFamily, root_level: i32) -> Result<Self> {
        family.check_packing(root_level)?;
        Ok(Self(family))
    }

    pub fn family(&self) -> &CubeFamily {
        &self.0
    }

    pub fn into_family(self) -> CubeFamily {
        self.0
    }

    pub fn tau(&self) -> f64 {
        self.0.tau
    }

    pub fn cubes(&self) -> &[DyadicCube] {
        &self.0.cubes
    }
}

impl TryFrom<CubeFamily> for RegularFamily {
    type Error = Error;

    fn try_from(family: CubeFamily) -> Result<Self> {
        Self::try_new(family, DEFAULT_ROOT_LEVEL)
    }
}

/// [`regularize_in`] with the default root box.
pub fn regularize(family: &CubeFamily) -> Result<RegularFamily> {
    regularize_in(family, DEFAULT_ROOT_LEVEL)
}

/// Replaces a finite family by a regular one that covers it and has no
/// larger `tau`-weight.
///
/// Bottom-up merge: walking levels from the finest member level to the root
/// level, every dyadic cube whose current inner weight exceeds `side^tau`
/// replaces all members inside it. Duplicates contribute their multiplicity
/// to the weight. Ties are kept (the inequality is not strict).
pub fn regularize_in(family: &CubeFamily, root_level: i32) -> Result<RegularFamily> {
    family.validate(root_level)?;
    let tau = family.tau;
    if family.is_empty() {
        return Ok(RegularFamily(CubeFamily::new(tau, Vec::new())));
    }

    let mut by_level: BTreeMap<i32, BTreeMap<Vec<i64>, u64>> = BTreeMap::new();
    for c in &family.cubes {
        *by_level
            .entry(c.level)
            .or_default()
            .entry(c.coords.clone())
            .or_insert(0) += 1;
    }
    let finest = *by_level.keys().next_back().expect("nonempty");

    let mut merged: BTreeSet<DyadicCube> = BTreeSet::new();
    let mut pending: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for level in (-root_level..=finest).rev() {
        let w = dyadic_pow(level, tau);
        if let Some(members) = by_level.get(&level) {
            for (coords, &mult) in members {
                *pending.entry(coords.clone()).or_insert(0.0) += mult as f64 * w;
            }
        }
        let mut next: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (coords, mut weight) in core::mem::take(&mut pending) {
            if weight > w {
                merged.insert(DyadicCube::new(level, coords.clone()));
                weight = w;
            }
            if level > -root_level {
                *next.entry(coords.iter().map(|k| k >> 1).collect()).or_insert(0.0) += weight;
            }
        }
        pending = next;
    }

    let mut out: BTreeSet<DyadicCube> = merged.clone();
    for c in &family.cubes {
        out.insert(c.clone());
    }
    let cubes: Vec<DyadicCube> = out
        .into_iter()
        .filter(|c| {
            !c.ancestors_inclusive(-root_level)
                .skip(1)
                .any(|a| merged.contains(&a))
        })
        .collect();
    Ok(RegularFamily(CubeFamily::new(tau, cubes)))
}

/// Measure queried on dyadic cubes.
pub trait CubeMeasure {
    fn dim(&self) -> usize;

    /// `mu(Q)`.
    fn mass(&self, cube: &DyadicCube) -> f64;

    /// `sup_I side(I)^{-beta} mu(I)` over dyadic cubes `I`.
    fn norm_beta(&self, beta: f64) -> Result<f64>;

    fn total_mass(&self) -> f64;
}

/// Measure with constant density on each of finitely many nonoverlapping
/// dyadic pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseUniform {
    dim: usize,
    root_level: i32,
    pieces: Vec<(DyadicCube, f64)>,
    piece_index: BTreeMap<DyadicCube, f64>,
    subtree: BTreeMap<DyadicCube, f64>,
}

impl PiecewiseUniform {
    pub fn new(dim: usize, pieces: Vec<(DyadicCube, f64)>, root_level: i32) -> Result<Self> {
        let mut piece_index = BTreeMap::new();
        for (c, d) in &pieces {
            if c.dim() != dim {
                return Err(domain!("piece {c} does not have dimension {dim}"));
            }
            if !(*d >= 0.0) || !d.is_finite() {
                return Err(domain!("densities must be finite and nonnegative, got {d}"));
            }
            if !c.within_root(root_level) {
                return Err(domain!("piece {c} lies outside the root box"));
            }
            if piece_index.insert(c.clone(), *d).is_some() {
                return Err(domain!("duplicate piece {c}"));
            }
        }
        for (c, _) in &pieces {
            if c.ancestors_inclusive(-root_level)
                .skip(1)
                .any(|a| piece_index.contains_key(&a))
            {
                return Err(domain!("piece {c} overlaps another piece"));
            }
        }
        let mut subtree: BTreeMap<DyadicCube, f64> = BTreeMap::new();
        for (c, d) in &pieces {
            let m = d * libm::pow(c.side(), dim as f64);
            for a in c.ancestors_inclusive(-root_level) {
                *subtree.entry(a).or_insert(0.0) += m;
            }
        }
        Ok(Self {
            dim,
            root_level,
            pieces,
            piece_index,
            subtree,
        })
    }

    /// Lebesgue measure restricted to the unit cube `[0,1]^n`.
    pub fn lebesgue_unit(dim: usize) -> Self {
        Self::new(dim, alloc::vec![(DyadicCube::unit(dim), 1.0)], DEFAULT_ROOT_LEVEL)
            .expect("unit cube is a valid piece")
    }

    pub fn pieces(&self) -> &[(DyadicCube, f64)] {
        &self.pieces
    }

    pub fn root_level(&self) -> i32 {
        self.root_level
    }
}

impl CubeMeasure for PiecewiseUniform {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mass(&self, cube: &DyadicCube) -> f64 {
        if cube.dim() != self.dim {
            return 0.0;
        }
        if let Some(m) = self.subtree.get(cube) {
            return *m;
        }
        // Strictly inside a piece?
        for a in cube.ancestors_inclusive(-self.root_level).skip(1) {
            if let Some(d) = self.piece_index.get(&a) {
                return d * libm::pow(cube.side(), self.dim as f64);
            }
        }
        0.0
    }

    fn norm_beta(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return Err(domain!("beta must be positive, got {beta}"));
        }
        let n = self.dim as f64;
        let mut sup: f64 = 0.0;
        for (cube, m) in &self.subtree {
            sup = sup.max(m * dyadic_pow(cube.level, -beta));
        }
        if beta > n && self.pieces.iter().any(|(_, d)| *d > 0.0) {
            return Err(Error::Overflow(alloc::format!(
                "beta = {beta} exceeds the dimension {n} of an absolutely continuous measure"
            )));
        }
        Ok(sup)
    }

    fn total_mass(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(c, d)| d * libm::pow(c.side(), self.dim as f64))
            .sum()
    }
}

/// Finite sum of point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub dim: usize,
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl CubeMeasure for DiscreteMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mass(&self, cube: &DyadicCube) -> f64 {
        self.atoms
            .iter()
            .filter(|(x, _)| cube.contains_point(x))
            .map(|(_, w)| w)
            .sum()
    }

    fn norm_beta(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return Err(domain!("beta must be positive, got {beta}"));
        }
        if self.atoms.iter().any(|(_, w)| *w > 0.0) {
            return Err(Error::Overflow(alloc::format!(
                "a point mass has infinite beta-norm for beta = {beta} > 0"
            )));
        }
        Ok(0.0)
    }

    fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

/// `d mu = sum_i side(Q_i)^{tau - n} 1_{Q_i} dy` over a regular family.
/// Satisfies `mu(Q_i) = side(Q_i)^tau` and `mu(Q) <= side(Q)^tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanMeasure {
    tau: f64,
    family: RegularFamily,
    inner: PiecewiseUniform,
}

impl FrostmanMeasure {
    pub fn new(family: RegularFamily) -> Self {
        Self::with_root(family, DEFAULT_ROOT_LEVEL)
    }

    pub fn with_root(family: RegularFamily, root_level: i32) -> Self {
        let tau = family.tau();
        let dim = family.family().dim().unwrap_or(1);
        let n = dim as f64;
        let pieces: Vec<(DyadicCube, f64)> = family
            .cubes()
            .iter()
            .map(|c| (c.clone(), dyadic_pow(c.level, tau - n)))
            .collect();
        let inner = PiecewiseUniform::new(dim, pieces, root_level)
            .expect("regular families are nonoverlapping and inside the root box");
        Self { tau, family, inner }
    }

    /// Checks the packing inequality first; failure reports the witness cube.
    pub fn from_family(family: CubeFamily, root_level: i32) -> Result<Self> {
        let regular = RegularFamily::try_new(family, root_level)?;
        Ok(Self::with_root(regular, root_level))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn family(&self) -> &RegularFamily {
        &self.family
    }

    pub fn as_piecewise(&self) -> &PiecewiseUniform {
        &self.inner
    }

    /// Member weights `side(Q_i)^tau`, which are also the masses of the members.
    pub fn member_masses(&self) -> Vec<f64> {
        self.family.cubes().iter().map(|c| c.side_pow(self.tau)).collect()
    }
}

impl CubeMeasure for FrostmanMeasure {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn mass(&self, cube: &DyadicCube) -> f64 {
        // Members and their ancestors are summed from exact member weights.
        if let Some(m) = self.inner.subtree.get(cube) {
            if self.inner.piece_index.contains_key(cube) {
                return cube.side_pow(self.tau);
            }
            return *m;
        }
        self.inner.mass(cube)
    }

    fn norm_beta(&self, beta: f64) -> Result<f64> {
        self.inner.norm_beta(beta)
    }

    fn total_mass(&self) -> f64 {
        self.family.family().tau_weight()
    }
}

impl AsRef<PiecewiseUniform> for FrostmanMeasure {
    fn as_ref(&self) -> &PiecewiseUniform {
        &self.inner
    }
}

impl AsRef<PiecewiseUniform> for PiecewiseUniform {
    fn as_ref(&self) -> &PiecewiseUniform {
        self
    }
}

/// Constructs the Frostman-type measure of a regular family.
pub fn frostman_measure(family: RegularFamily) -> FrostmanMeasure {
    FrostmanMeasure::new(family)
}

/// `sup_I side(I)^{-beta} mu(I)`.
pub fn measure_norm_beta<M: CubeMeasure + ?Sized>(mu: &M, beta: f64) -> Result<f64> {
    mu.norm_beta(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c1(level: i32, k: i64) -> DyadicCube {
        DyadicCube::new(level, vec![k])
    }

    #[test]
    fn cube_geometry() {
        let c = DyadicCube::new(3, vec![1, 5]);
        assert_eq!(c.side(), 0.125);
        assert_eq!(c.lower_corner(), vec![0.125, 0.625]);
        assert_eq!(c.parent(), DyadicCube::new(2, vec![0, 2]));
        assert!(c.parent().contains(&c));
        let neg = c1(2, -3);
        assert_eq!(neg.parent(), c1(1, -2));
        assert!(neg.parent().contains(&neg));
        assert_eq!(c1(0, 0).children(), vec![c1(1, 0), c1(1, 1)]);
        assert_eq!(DyadicCube::unit(2).children().len(), 4);
        assert!(c1(-1, 0).within_root(4));
        assert!(!c1(-5, 0).within_root(4));
        assert!(c1(0, -16).within_root(4));
        assert!(!c1(0, 16).within_root(4));
        assert_eq!(DyadicCube::containing_point(&[-0.1], 3), c1(3, -1));
    }

    #[test]
    fn nested_or_disjoint() {
        let a = c1(2, 1);
        let b = c1(4, 5);
        let c = c1(4, 8);
        assert!(a.overlaps(&b));
        assert!(!a.overlaps(&c));
        assert!(!c1(0, -1).overlaps(&c1(0, 0)));
    }

    #[test]
    fn regularize_singleton_is_identity() {
        let fam = CubeFamily::new(0.7, vec![DyadicCube::new(5, vec![3, -2])]);
        assert_eq!(regularize(&fam).unwrap().family(), &fam);
    }

    #[test]
    fn regularize_tie_keeps_children() {
        let fam = CubeFamily::new(1.0, vec![c1(1, 0), c1(1, 1)]);
        let reg = regularize(&fam).unwrap();
        assert_eq!(reg.cubes(), &[c1(1, 0), c1(1, 1)]);
    }

    #[test]
    fn regularize_merges_heavy_children() {
        // 2 * (1/2)^0.5 ~ 1.414 > 1
        let fam = CubeFamily::new(0.5, vec![c1(1, 0), c1(1, 1)]);
        let reg = regularize(&fam).unwrap();
        assert_eq!(reg.cubes(), &[c1(0, 0)]);
        assert!(reg.family().tau_weight() <= fam.tau_weight());
    }

    #[test]
    fn duplicates_merge_through_multiplicity() {
        let fam = CubeFamily::new(1.0, vec![c1(3, 2), c1(3, 2)]);
        let reg = regularize(&fam).unwrap();
        assert_eq!(reg.cubes(), &[c1(3, 2)]);
        assert!(fam.check_packing(4).is_err());
        assert!(fam.find_overlap().is_some());
    }

    #[test]
    fn regularize_errors_and_empty() {
        assert!(regularize(&CubeFamily::new(0.0, vec![c1(0, 0)])).is_err());
        assert!(regularize(&CubeFamily::new(0.5, vec![])).unwrap().cubes().is_empty());
        assert!(regularize(&CubeFamily::new(0.5, vec![c1(0, 100)])).is_err());
    }

    #[test]
    fn nested_members_collapse_to_outer() {
        let fam = CubeFamily::new(0.8, vec![c1(1, 0), c1(4, 3)]);
        let reg = regularize(&fam).unwrap();
        assert_eq!(reg.cubes(), &[c1(1, 0)]);
    }

    #[test]
    fn not_regular_reports_witness() {
        let fam = CubeFamily::new(0.5, vec![c1(1, 0), c1(1, 1)]);
        match FrostmanMeasure::from_family(fam, 4) {
            Err(Error::NotRegular { cube, .. }) => assert_eq!(cube, c1(0, 0)),
            other => panic!("expected NotRegular, got {other:?}"),
        }
    }

    #[test]
    fn frostman_examples() {
        let reg = RegularFamily::try_from(CubeFamily::new(0.5, vec![c1(0, 0)])).unwrap();
        let mu = frostman_measure(reg);
        assert_eq!(mu.mass(&c1(0, 0)), 1.0);
        assert_relative_eq!(mu.mass(&c1(1, 0)), 0.5);
        assert!(mu.mass(&c1(1, 0)) <= c1(1, 0).side_pow(0.5));
        assert_eq!(mu.mass(&c1(1, 2)), 0.0);
        assert_eq!(mu.total_mass(), 1.0);
        assert_relative_eq!(measure_norm_beta(&mu, 0.5).unwrap(), 1.0);

        let empty = frostman_measure(RegularFamily::try_from(CubeFamily::new(0.5, vec![])).unwrap());
        assert_eq!(empty.mass(&c1(0, 0)), 0.0);
        assert_eq!(empty.total_mass(), 0.0);
    }

    #[test]
    fn norm_beta_examples() {
        for n in 1..=2 {
            let leb = PiecewiseUniform::lebesgue_unit(n);
            assert_relative_eq!(measure_norm_beta(&leb, n as f64).unwrap(), 1.0);
        }
        let point = DiscreteMeasure {
            dim: 1,
            atoms: vec![(vec![0.3], 1.0)],
        };
        assert!(matches!(measure_norm_beta(&point, 0.5), Err(Error::Overflow(_))));
        assert_eq!(point.mass(&c1(1, 0)), 1.0);
        let leb = PiecewiseUniform::lebesgue_unit(1);
        assert!(matches!(leb.norm_beta(1.5), Err(Error::Overflow(_))));
        assert!(leb.norm_beta(0.0).is_err());
    }

    #[test]
    fn covers_handles_split_covers() {
        let out = CubeFamily::new(1.0, vec![c1(1, 0), c1(2, 2), c1(2, 3)]);
        assert!(out.covers(&c1(0, 0)));
        assert!(!out.covers(&c1(0, 1)));
    }

    fn family_strategy() -> impl Strategy<Value = CubeFamily> {
        let cube = (0i32..=8, 0u64..u64::MAX).prop_map(|(level, r)| {
            let span = 1i64 << (level + 2);
            c1(level, (r % (2 * span as u64)) as i64 - span)
        });
        (0.1f64..1.5, proptest::collection::vec(cube, 0..40))
            .prop_map(|(tau, cubes)| CubeFamily::new(tau, cubes))
    }

    proptest! {
        #[test]
        fn regularize_contract(fam in family_strategy()) {
            let reg = regularize(&fam).unwrap();
            prop_assert!(reg.family().covers_family(&fam));
            prop_assert!(reg.family().tau_weight() <= fam.tau_weight() * (1.0 + 1e-12) + 1e-300);
            prop_assert!(reg.family().find_overlap().is_none());
            prop_assert!(reg.family().check_packing(DEFAULT_ROOT_LEVEL).is_ok());
            let again = regularize(reg.family()).unwrap();
            prop_assert_eq!(again.cubes(), reg.cubes());

            let mu = frostman_measure(reg.clone());
            prop_assert!((mu.total_mass() - reg.family().tau_weight()).abs() <= 1e-12 * mu.total_mass().max(1.0));
            for (cube, _) in reg.family().packing_sums(DEFAULT_ROOT_LEVEL) {
                prop_assert!(mu.mass(&cube) <= cube.side_pow(reg.tau()) * (1.0 + 1e-12));
            }
        }
    }
}
