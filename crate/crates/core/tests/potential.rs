use hlab_core::dyadic::PiecewiseUniform;
use hlab_core::grid::GridSpec;
use hlab_core::potential::{
    adams_ratio, besov_modulus, bessel_kernel, bessel_potential, diam_bound_check, local_potential_ratio, maximal,
    maximal_at, riesz_potential, riesz_potential_at, split_local_far, AdamsMode, DiamMode, KernelSpec, KernelTable,
};
use hlab_core::{DyadicCube, GridFunction};
use proptest::prelude::*;

fn indicator(spec: GridSpec, lo: f64, hi: f64) -> GridFunction {
    GridFunction::from_fn(spec, move |x| if x[0] > lo && x[0] < hi { 1.0 } else { 0.0 })
}

/// `∫_0^∞ K(r) dr` through `r = u²`, composite Simpson on `[0, 8]`.
fn half_line_mass(spec: &KernelSpec) -> f64 {
    let n = 4000;
    let h = 8.0 / n as f64;
    // the integrand tends to a finite limit at u = 0
    let f = |u: f64| {
        let u = u.max(1e-9);
        bessel_kernel(spec, u * u).unwrap() * 2.0 * u
    };
    let mut s = f(0.0) + f(8.0);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn random_grid(values: Vec<f64>) -> GridFunction {
    let spec = GridSpec::cube(1, -2.0, 4.0, values.len()).unwrap();
    GridFunction::new(spec, values).unwrap()
}

#[test]
fn riesz_of_interval_at_origin() {
    let spec = GridSpec::cube(1, -4.0, 8.0, 256).unwrap();
    let f = indicator(spec, -1.0, 1.0);
    let v = riesz_potential_at(&f, 0.5, &[0.0]).unwrap();
    assert!((v - 4.0).abs() < 0.01, "{v}");
    let zero = riesz_potential(&GridFunction::zeros(f.spec()), 0.5).unwrap();
    assert!(zero.values().iter().all(|&x| x == 0.0));
}

#[test]
fn maximal_of_interval() {
    let spec = GridSpec::cube(1, -4.0, 8.0, 512).unwrap();
    let g = indicator(spec, 0.0, 1.0);
    let m = maximal_at(&g, 0.0, &[2.0]).unwrap();
    assert!((m - 0.25).abs() < 0.02, "{m}");
    let c = GridFunction::from_fn(GridSpec::cube(1, 0.0, 1.0, 64).unwrap(), |_| 3.0);
    let mc = maximal(&c, 0.0).unwrap();
    // zero extension lowers averages near the boundary only
    let mid = mc.values()[32];
    assert!((mid - 3.0).abs() < 1e-12, "{mid}");
}

#[test]
fn kernel_unit_mass() {
    for alpha in [0.5, 1.5] {
        let spec = KernelSpec::bessel(alpha, 1).unwrap();
        let mass = 2.0 * half_line_mass(&spec);
        assert!((mass - 1.0).abs() < 1e-3, "alpha {alpha}: {mass}");
        let table = KernelTable::build(spec, 1.0 / 64.0, 64 * 40).unwrap();
        assert!((table.total_mass() - 1.0).abs() < 1e-3, "alpha {alpha}: table {}", table.total_mass());
    }
}

#[test]
fn kernel_closed_form_alpha_two() {
    let spec = KernelSpec::bessel(2.0, 1).unwrap();
    for r in [0.01, 0.3, 1.0, 2.5, 6.0] {
        let k = bessel_kernel(&spec, r).unwrap();
        let exact = 0.5 * (-r).exp();
        assert!((k - exact).abs() <= 1e-6 * exact, "r={r}: {k} vs {exact}");
    }
}

#[test]
fn kernel_asymptotics() {
    for (alpha, n) in [(0.5, 1), (0.5, 2), (1.5, 2)] {
        let spec = KernelSpec::bessel(alpha, n).unwrap();
        let scaled: Vec<f64> = (1..=4)
            .map(|k| {
                let r = 10f64.powi(-k);
                bessel_kernel(&spec, r).unwrap() * r.powf(n as f64 - alpha)
            })
            .collect();
        let hi = scaled.iter().copied().fold(0.0, f64::max);
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.0, "alpha {alpha} n {n}: {scaled:?}");
        let k1 = bessel_kernel(&spec, 1.0).unwrap();
        let k2 = bessel_kernel(&spec, 2.0).unwrap();
        assert!(k2 < k1 * (-0.5f64).exp());
    }
}

#[test]
fn bessel_of_constant_is_constant_inside() {
    let spec = GridSpec::cube(1, -40.0, 80.0, 1280).unwrap();
    let one = GridFunction::from_fn(spec, |_| 1.0);
    let v = bessel_potential(&one, 1.5).unwrap();
    for x in [-10.0, 0.0, 10.0] {
        assert!((v.cell_value(&[x]) - 1.0).abs() < 1e-2, "{x}");
    }
}

#[test]
fn besov_references() {
    let spec = GridSpec::cube(1, -1.0, 2.0, 1024).unwrap();
    let affine = GridFunction::from_fn(spec.clone(), |x| 3.0 * x[0] - 1.0);
    let m = besov_modulus(&affine, 1, 1.0 / 16.0).unwrap();
    assert!(m.lp_norm(2.0) < 1e-9);

    let h = spec.step();
    let parabola = GridFunction::from_fn(spec, |x| 0.5 * x[0] * x[0]);
    for t in [1.0 / 8.0, 1.0 / 32.0] {
        let m = besov_modulus(&parabola, 1, t).unwrap();
        let mean: f64 = m.field.values().iter().zip(&m.valid).filter(|(_, &ok)| ok).map(|(v, _)| *v).sum::<f64>()
            / m.valid_count() as f64;
        assert!((mean - t / 4.0).abs() <= h, "t={t}: {mean}");
    }
}

#[test]
fn adams_zero_and_hypotheses() {
    let mu = PiecewiseUniform::lebesgue_unit(1);
    let zero = GridFunction::zeros(GridSpec::cube(1, 0.0, 1.0, 64).unwrap());
    let r = adams_ratio(&zero, &mu, 0.25, 2.0, 2.5, AdamsMode::Riesz).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert_eq!(r.ratio, 0.0);
    assert!(adams_ratio(&zero, &mu, 0.25, 2.0, 2.0, AdamsMode::Riesz).is_err());
    assert!(adams_ratio(&zero, &mu, 0.25, 2.0, 2.5, AdamsMode::Lorentz).is_err());
    assert!(adams_ratio(&zero, &mu, 0.75, 2.0, 2.5, AdamsMode::Riesz).is_err());
}

#[test]
fn adams_refinement_on_lebesgue() {
    let mu = PiecewiseUniform::lebesgue_unit(1);
    let g = |x: &[f64]| 1.0 + (7.0 * x[0]).sin().abs() + if x[0] > 0.6 && x[0] < 0.62 { 5.0 } else { 0.0 };
    let coarse = GridFunction::from_fn(GridSpec::cube(1, 0.0, 1.0, 256).unwrap(), g);
    let fine = GridFunction::from_fn(GridSpec::cube(1, 0.0, 1.0, 512).unwrap(), g);
    let a = adams_ratio(&coarse, &mu, 0.25, 2.0, 2.5, AdamsMode::Riesz).unwrap().ratio;
    let b = adams_ratio(&fine, &mu, 0.25, 2.0, 2.5, AdamsMode::Riesz).unwrap().ratio;
    assert!(a.is_finite() && a > 0.0);
    assert!(a.max(b) / a.min(b) < 2.0, "{a} {b}");
}

#[test]
fn diameter_zero_data() {
    let g = GridFunction::zeros(GridSpec::cube(1, -2.0, 4.0, 512).unwrap());
    let q = DyadicCube::new(3, vec![2]);
    for mode in [DiamMode::Riesz, DiamMode::Maximal, DiamMode::Lorentz] {
        let b = diam_bound_check(&g, &q, 2.0, 3.0, 0.5, mode).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert_eq!(b.ratio, 0.0);
    }
}

#[test]
fn diameter_translation_invariance() {
    let spec = GridSpec::cube(1, -2.0, 4.0, 1024).unwrap();
    let bump = |c: f64| move |x: &[f64]| (-(x[0] - c) * (x[0] - c) * 20.0).exp() + if (x[0] - c).abs() < 0.05 { 1.0 } else { 0.0 };
    let g0 = GridFunction::from_fn(spec.clone(), bump(0.25));
    let g1 = GridFunction::from_fn(spec, bump(0.75));
    let q0 = DyadicCube::new(3, vec![1]);
    let q1 = DyadicCube::new(3, vec![5]);
    let a = diam_bound_check(&g0, &q0, 2.0, 3.0, 0.5, DiamMode::Riesz).unwrap();
    let b = diam_bound_check(&g1, &q1, 2.0, 3.0, 0.5, DiamMode::Riesz).unwrap();
    assert!((a.ratio - b.ratio).abs() <= 1e-6 * a.ratio, "{a:?} {b:?}");
}

#[test]
fn split_cases() {
    let spec = GridSpec::cube(1, -2.0, 4.0, 64).unwrap();
    let q = DyadicCube::new(2, vec![1]);
    let inside = indicator(spec.clone(), 0.2, 0.55);
    let (l, f) = split_local_far(&inside, &q).unwrap();
    assert_eq!(l.values(), inside.values());
    assert!(f.values().iter().all(|&v| v == 0.0));
    let outside = indicator(spec.clone(), 1.5, 2.0);
    let (l, f) = split_local_far(&outside, &q).unwrap();
    assert!(l.values().iter().all(|&v| v == 0.0));
    assert_eq!(f.values(), outside.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn riesz_linear_and_positive(
        a in prop::collection::vec(0.0f64..2.0, 64),
        b in prop::collection::vec(0.0f64..2.0, 64),
        ca in -3.0f64..3.0,
        cb in -3.0f64..3.0,
    ) {
        let (f, g) = (random_grid(a), random_grid(b));
        let lhs = riesz_potential(&f.combine(ca, &g, cb).unwrap(), 0.5).unwrap();
        let rf = riesz_potential(&f, 0.5).unwrap();
        let rg = riesz_potential(&g, 0.5).unwrap();
        let scale = rf.sup_norm().max(rg.sup_norm()) * (ca.abs() + cb.abs()) + 1.0;
        for i in 0..lhs.len() {
            prop_assert!((lhs.values()[i] - (ca * rf.values()[i] + cb * rg.values()[i])).abs() <= 1e-12 * scale);
            prop_assert!(rf.values()[i] >= 0.0);
        }
    }

    #[test]
    fn maximal_sublinear(
        a in prop::collection::vec(-2.0f64..2.0, 64),
        b in prop::collection::vec(-2.0f64..2.0, 64),
        beta in 0.0f64..0.9,
    ) {
        let (f, g) = (random_grid(a), random_grid(b));
        let sum = maximal(&f.combine(1.0, &g, 1.0).unwrap(), beta).unwrap();
        let mf = maximal(&f, beta).unwrap();
        let mg = maximal(&g, beta).unwrap();
        for i in 0..sum.len() {
            prop_assert!(sum.values()[i] <= mf.values()[i] + mg.values()[i] + 1e-12);
        }
        if beta == 0.0 {
            for i in 0..f.len() {
                prop_assert!(mf.values()[i] >= f.values()[i].abs() - 1e-12);
            }
        }
    }

    #[test]
    fn bessel_sup_bound_and_smoothing(a in prop::collection::vec(-1.0f64..1.0, 128)) {
        let f = random_grid(a);
        let v = bessel_potential(&f, 1.5).unwrap();
        prop_assert!(v.sup_norm() <= f.sup_norm() * (1.0 + 1e-2));
        prop_assert!(v.total_variation() <= f.total_variation() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn adams_scale_invariant(a in prop::collection::vec(0.01f64..2.0, 64), c in 0.1f64..10.0) {
        let spec = GridSpec::cube(1, 0.0, 1.0, 64).unwrap();
        let g = GridFunction::new(spec, a).unwrap();
        let mu = PiecewiseUniform::lebesgue_unit(1);
        for (mode, s) in [(AdamsMode::Riesz, 2.5), (AdamsMode::Maximal, 2.0), (AdamsMode::Lorentz, 2.0)] {
            let r0 = adams_ratio(&g, &mu, 0.25, 2.0, s, mode).unwrap().ratio;
            let r1 = adams_ratio(&g.scale(c), &mu, 0.25, 2.0, s, mode).unwrap().ratio;
            prop_assert!((r0 - r1).abs() <= 1e-9 * r0);
        }
    }

    #[test]
    fn local_potential_bounded(a in prop::collection::vec(0.0f64..2.0, 256), k in 4i64..12, u in 0.0f64..1.0) {
        let spec = GridSpec::cube(1, -2.0, 4.0, 256).unwrap();
        let g = GridFunction::new(spec, a).unwrap();
        let q = DyadicCube::new(3, vec![k - 8]);
        let x = q.lower_corner()[0] + (0.05 + 0.9 * u) * q.side();
        let r = local_potential_ratio(&g, None, &q, &[x], 0.5).unwrap();
        prop_assert!(r.ratio.is_finite());
        prop_assert!(r.ratio < 50.0, "{r:?}");
    }
}
