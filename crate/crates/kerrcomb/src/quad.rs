//! Gauss-Legendre quadrature on finite intervals.
//!
//! Used for the half-period integrals of Appendix-B type identities, whose
//! integrands are smooth on [0, T] but not periodic across T, so the
//! trapezoid rule on the periodic grid is not appropriate.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre polynomial recurrence; accurate to
/// machine precision for the moderate n used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrate `f` over [a, b] with the n-point Gauss-Legendre rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Cumulative integral of `f` from `a` to each point of `xs` (ascending,
/// xs[0] >= a), using a per-interval Gauss-Legendre rule.
pub fn cumulative<F: Fn(f64) -> f64>(f: &F, a: f64, xs: &[f64], n_per_interval: usize) -> Vec<f64> {
    let (gx, gw) = gauss_legendre(n_per_interval);
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut left = a;
    for &x in xs {
        let mid = 0.5 * (left + x);
        let half = 0.5 * (x - left);
        acc += half
            * gx
                .iter()
                .zip(&gw)
                .map(|(&xi, &wi)| wi * f(mid + half * xi))
                .sum::<f64>();
        out.push(acc);
        left = x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // 8-point rule integrates degree-15 polynomials exactly.
        let v = integrate(|x| x.powi(14), -1.0, 1.0, 8);
        assert!((v - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integral() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 64);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let xs: Vec<f64> = (1..=20).map(|i| i as f64 * 0.1).collect();
        let c = cumulative(&f64::cos, 0.0, &xs, 8);
        for (x, v) in xs.iter().zip(&c) {
            assert!((v - x.sin()).abs() < 1e-14);
        }
    }
}
