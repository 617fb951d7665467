//! Small numerical helpers shared by the operator modules.

use alloc::vec::Vec;

/// `2^e` exactly, for any `e` in the normal range.
#[inline]
pub fn exp2i(e: i32) -> f64 {
    libm::ldexp(1.0, e)
}

/// `side^s` for a dyadic side `2^{-level}`, evaluated as `2^{-level * s}`.
#[inline]
pub fn dyadic_pow(level: i32, s: f64) -> f64 {
    libm::exp2(-(level as f64) * s)
}

/// `d^s`, routed through [`dyadic_pow`] when `d` is an exact power of two
/// so that dyadic sides and measured lengths give identical results.
pub fn pow_len(d: f64, s: f64) -> f64 {
    if d > 0.0 && d.is_finite() {
        let (m, e) = libm::frexp(d);
        if m == 0.5 {
            return dyadic_pow(1 - e, s);
        }
    }
    libm::pow(d, s)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; order];
    let mut weights = alloc::vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if order == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Ordinary least-squares line `y = intercept + slope * x`.
/// Returns `(slope, intercept, rms_residual)`; `None` when fewer than two
/// points or all `x` coincide.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Some((slope, intercept, libm::sqrt(ss / nf)))
}

/// Median of a slice (average of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is exact for 8 nodes
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, 14.0)).sum();
        assert_relative_eq!(integral, 2.0 / 15.0, max_relative = 1e-13);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_32_is_symmetric() {
        let (x, w) = gauss_legendre(32);
        for i in 0..16 {
            assert_relative_eq!(x[i], -x[31 - i], max_relative = 1e-15);
            assert_relative_eq!(w[i], w[31 - i], max_relative = 1e-15);
        }
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * libm::cos(*x)).sum();
        assert_relative_eq!(integral, 2.0 * libm::sin(1.0), max_relative = 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert_relative_eq!(s.value(), 1e-14, max_relative = 1e-6);
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (m, b, r) = linear_fit(&xs, &ys).unwrap();
        assert_relative_eq!(m, 2.0);
        assert_relative_eq!(b, 1.0);
        assert!(r < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
