//! Quadrature rules used by the identity checks and the covariance integrals.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Equispaced trapezoid rule on the unit circle: points and weights 2π/m.
pub fn circle_rule(m: usize) -> Vec<(Vec<f64>, f64)> {
    let w = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            (vec![th.cos(), th.sin()], w)
        })
        .collect()
}

/// Gauss–Legendre in x₃ times an equispaced rule in the azimuth (2·n_polar
/// points). Exact for spherical polynomials of degree < 2·n_polar.
pub fn sphere_rule(n_polar: usize) -> Vec<(Vec<f64>, f64)> {
    let (zs, ws) = gauss_legendre(n_polar);
    let n_az = 2 * n_polar;
    let daz = 2.0 * PI / n_az as f64;
    let mut out = Vec::with_capacity(n_polar * n_az);
    for (z, wz) in zs.iter().zip(&ws) {
        let s = (1.0 - z * z).max(0.0).sqrt();
        for k in 0..n_az {
            let phi = daz * k as f64;
            out.push((vec![s * phi.cos(), s * phi.sin(), *z], wz * daz));
        }
    }
    out
}

/// Surface rule for S^{n−1}, n ∈ {2, 3}, resolving bandwidth up to roughly `band`.
pub fn unit_sphere_rule(n: usize, band: f64) -> Vec<(Vec<f64>, f64)> {
    let k = (band.ceil() as usize).max(4);
    if n == 2 {
        circle_rule(2 * k + 32)
    } else {
        sphere_rule(k + 24)
    }
}

/// Adaptive Simpson integration with an absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((i - 2.0 / 19.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!(x1, vec![0.0]);
        assert!((w1[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_rule_area() {
        let area: f64 = sphere_rule(12).iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn simpson_on_smooth_integrand() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
