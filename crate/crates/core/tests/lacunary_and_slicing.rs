use hlab_core::fractal::{cantor_set, dyadic_content, CantorMode, PointSetMeta};
use hlab_core::grid::GridSpec;
use hlab_core::lacunary::{difference_quotient_probe, geometric_scales, Coefficients, LacunarySeries};
use hlab_core::slicing::{holder_split, image_diameter_sum, phi_estimate, phi_sum, Identity};
use hlab_core::{CubeFamily, DyadicCube, GridFunction, PointSet};
use proptest::prelude::*;

fn f_sigma_oracle(sigma: f64, terms: u32, x: f64) -> f64 {
    // descending order, plain summation
    let mut s = 0.0;
    for m in (1..=terms).rev() {
        let b = 5f64.powi(m as i32);
        s += (m as f64).powf(-sigma) / b * (b * x).cos();
    }
    (-x * x).exp() * s
}

#[test]
fn f_sigma_at_origin() {
    let f = LacunarySeries::f_sigma(0.4).unwrap();
    let ev = f.evaluate(0.0);
    let oracle = f_sigma_oracle(0.4, 20, 0.0);
    assert!((ev.value - oracle).abs() <= 1e-12);
    assert!(ev.error_bound >= 5f64.powi(-20) / 4.0);
    assert!(ev.error_bound < 1e-13);
}

#[test]
fn unit_series_at_rational_points() {
    let w = LacunarySeries::new(0.0, 5.0, Coefficients::Unit, false, 12).unwrap();
    for j in 0..10 {
        let x = 2.0 * std::f64::consts::PI / 5.0 * j as f64;
        let mut s = 0.0;
        for m in (1..=12).rev() {
            s += 5f64.powi(-m) * (5f64.powi(m) * x).cos();
        }
        let ev = w.evaluate(x);
        assert!((ev.value - s).abs() <= ev.error_bound + 1e-15, "{j}");
    }
}

#[test]
fn controls() {
    let scales = [1e-1, -1e-2, 1e-3, -1e-4];
    let lin = |x: f64| x;
    let p = difference_quotient_probe(&lin, 0.3, &scales).unwrap();
    assert!(p.quotients.iter().all(|q| (q - 1.0).abs() < 1e-9));
    assert!(p.oscillation < 1e-9);
    let abs = |x: f64| x.abs();
    let p = difference_quotient_probe(&abs, 0.0, &scales).unwrap();
    assert_eq!(p.quotients, vec![1.0, -1.0, 1.0, -1.0]);
    assert_eq!(p.oscillation, 2.0);
}

#[test]
fn phi_identity_and_constant() {
    let e = cantor_set(1.0 / 3.0, 12, CantorMode::Endpoints, 0).unwrap();
    for level in 4..=9 {
        for q in [0.3, 0.63, 1.0] {
            let (value, _) = phi_sum(&e, &Identity, 0.0, q, level);
            assert_eq!(value, dyadic_content(&e, q, level).unwrap(), "level {level} q {q}");
        }
    }
    let constant = |_: &[f64]| 2.5;
    let est = phi_estimate(&e, &constant, 0.3, 0.7, &[4, 5, 6]).unwrap();
    assert!(est.per_level.iter().all(|(_, v)| *v == 0.0));
}

#[test]
fn phi_holder_map_bounded() {
    // Weierstrass-type map of Hölder exponent 1/2 on a segment
    let holder = |x: &[f64]| {
        let mut s = 0.0;
        for m in 1..=30 {
            let b = 4f64.powi(m);
            s += (b * x[0]).cos() / b.sqrt();
        }
        s
    };
    let xs: Vec<f64> = (0..4096).map(|i| (i as f64 + 0.5) / 4096.0).collect();
    let seg = PointSet::new(1, xs, PointSetMeta::default()).unwrap();
    let levels: Vec<i32> = (4..=9).collect();
    let est = phi_estimate(&seg, &holder, 0.0, 2.0, &levels).unwrap();
    let values: Vec<f64> = est.per_level.iter().map(|(_, v)| *v).collect();
    let hi = values.iter().copied().fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(hi / lo <= 4.0, "{values:?}");
}

#[test]
fn split_degenerates_at_sigma() {
    let cover = CubeFamily::new(0.6, (0..8).map(|k| DyadicCube::new(3, vec![k])).collect());
    let map = |x: &[f64]| (3.0 * x[0]).sin();
    let s = holder_split(&cover, &map, 0.6, 0.9, 0.9).unwrap();
    assert_eq!(s.mu, 0.0);
    assert!((s.lhs - image_diameter_sum(&cover, &map, 0.9)).abs() <= 1e-15 * s.lhs);
    assert!((s.rhs - s.factor_sigma).abs() <= 1e-14 * s.rhs);
    assert!(holder_split(&cover, &map, 0.6, 0.9, 1.0).is_err());
    assert!(holder_split(&cover, &map, 0.6, 0.9, 0.0).is_err());
}

fn random_cover() -> impl Strategy<Value = CubeFamily> {
    prop::collection::btree_set((2i32..12, 0i64..4096), 1..60).prop_map(|set| {
        let cubes = set
            .into_iter()
            .map(|(level, k)| DyadicCube::new(level, vec![k % (1i64 << level)]))
            .collect();
        CubeFamily::new(0.5, cubes)
    })
}

proptest! {
    #[test]
    fn series_even_and_enveloped(sigma in 0.0f64..0.5, x in -3.0f64..3.0) {
        let f = LacunarySeries::f_sigma(sigma).unwrap();
        let a = f.evaluate(x);
        let b = f.evaluate(-x);
        prop_assert_eq!(a.value, b.value);
        prop_assert!(a.value.abs() <= (-x * x).exp() * 0.25 + a.error_bound);
    }

    #[test]
    fn truncation_certificate(sigma in 0.0f64..0.5, x in -3.0f64..3.0, terms in 8u32..25) {
        let f = LacunarySeries::f_sigma(sigma).unwrap().with_terms(terms);
        let g = f.with_terms(terms + 5);
        let gap = (g.evaluate(x).value - f.evaluate(x).value).abs();
        prop_assert!(gap <= f.tail_bound() + f.evaluate(x).error_bound);
    }

    #[test]
    fn series_matches_oracle(sigma in 0.0f64..0.5, x in -2.0f64..2.0) {
        let f = LacunarySeries::f_sigma(sigma).unwrap();
        let ev = f.evaluate(x);
        prop_assert!((ev.value - f_sigma_oracle(sigma, 20, x)).abs() <= ev.error_bound);
    }

    #[test]
    fn holder_split_on_random_covers(
        cover in random_cover(),
        values in prop::collection::vec(-3.0f64..3.0, 256),
        tau in 0.1f64..1.0,
        sigma in 0.1f64..2.0,
        frac in 0.01f64..1.0,
    ) {
        let spec = GridSpec::cube(1, -1.0, 3.0, 256).unwrap();
        let v = GridFunction::new(spec, values).unwrap();
        let s = holder_split(&cover, &v, tau, sigma, frac * sigma).unwrap();
        prop_assert!(s.holds(1e-12), "{s:?}");
    }

    #[test]
    fn phi_identity_matches_content(xs in prop::collection::vec(0.0f64..1.0, 1..200), q in 0.05f64..1.5, level in 0i32..14) {
        let pts = PointSet::new(1, xs, PointSetMeta::default()).unwrap();
        let (value, _) = phi_sum(&pts, &Identity, 0.0, q, level);
        prop_assert_eq!(value, dyadic_content(&pts, q, level).unwrap());
    }
}

#[test]
fn geometric_scales_values() {
    let s = geometric_scales(5.0, 1, 3);
    assert_eq!(s.len(), 3);
    for (a, b) in s.iter().zip([0.2, 0.04, 0.008]) {
        assert!((a - b).abs() <= 1e-16);
    }
}
