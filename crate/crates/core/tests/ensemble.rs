use std::f64::consts::PI;

use monowave::ensemble::*;
use monowave::field::{helmholtz_residual, Field};
use monowave::rng;
use rand::Rng as _;

/// J_0 by its power series; used to bracket its first zero independently.
fn j0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= -(0.25 * x * x) / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

fn j0_first_zero_by_bisection() -> f64 {
    let (mut a, mut b) = (2.0, 3.0);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if j0_series(a) * j0_series(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let skew = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n / var.powf(1.5);
    let kurt = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n / (var * var) - 3.0;
    (mean, var, skew, kurt)
}

#[test]
fn reproducible_samples_and_evaluations() {
    for spec in [
        FieldSpec::plane_wave(2, 32, 1.0, 11),
        FieldSpec::plane_wave(3, 32, 0.4, 11),
        FieldSpec::p1_truncated(3, 12, 11),
        FieldSpec::sphere(7, 11),
    ] {
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a, b);
        let x: Vec<f64> = if spec.is_flat() { vec![0.3; spec.dim] } else { vec![0.0, 0.6, 0.8] };
        assert_eq!(a.evaluate(&x).unwrap().to_bits(), b.evaluate(&x).unwrap().to_bits());
    }
}

#[test]
fn plane_wave_pairs_are_antipodal_in_json() {
    let s = sample(&FieldSpec::plane_wave(2, 64, 1.0, 42)).unwrap();
    let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
    assert_eq!(json["directions"].as_array().unwrap().len(), 64);
    let full = with_antipodes(&s.directions);
    assert_eq!(full.len(), 128);
    for v in &full {
        assert!(full.iter().any(|w| (w[0] + v[0]).abs() < 1e-15 && (w[1] + v[1]).abs() < 1e-15));
    }
}

#[test]
fn zero_coefficients_give_zero_field() {
    let mut s = sample(&FieldSpec::plane_wave(3, 10, 1.0, 1)).unwrap();
    s.coefficients.iter_mut().for_each(|c| *c = 0.0);
    assert_eq!(s.evaluate(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
}

#[test]
fn p1_at_origin_only_degree_zero_contributes() {
    let mut s = sample(&FieldSpec::p1_truncated(3, 6, 9)).unwrap();
    let full = s.evaluate(&[0.0, 0.0, 0.0]).unwrap();
    for c in s.coefficients.iter_mut().skip(1) {
        *c = 0.0;
    }
    assert!((full - s.evaluate(&[0.0, 0.0, 0.0]).unwrap()).abs() < 1e-15);
}

#[test]
fn degree_one_sphere_zero_set_is_great_circle() {
    let s = sample(&FieldSpec::sphere(1, 2024)).unwrap();
    // m = 1, 2, 3 ↔ y, z, x
    let v = [s.coefficients[2], s.coefficients[0], s.coefficients[1]];
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let u = [v[0] / vn, v[1] / vn, v[2] / vn];
    // orthonormal frame (e1, e2) of u^⊥
    let pick = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = pick[0] * u[0] + pick[1] * u[1] + pick[2] * u[2];
    let mut e1 = [pick[0] - dot * u[0], pick[1] - dot * u[1], pick[2] - dot * u[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|c| *c /= n1);
    let e2 = [u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2], u[0] * e1[1] - u[1] * e1[0]];
    for k in 0..36 {
        let t = 2.0 * PI * k as f64 / 36.0;
        let p: Vec<f64> = (0..3).map(|i| t.cos() * e1[i] + t.sin() * e2[i]).collect();
        assert!(s.evaluate(&p).unwrap().abs() < 1e-12);
    }
    // and the field is nonzero off the circle
    assert!(s.evaluate(&u).unwrap().abs() > 1e-3);
}

#[test]
fn sphere_ensemble_rejects_off_sphere_points() {
    let s = sample(&FieldSpec::sphere(3, 1)).unwrap();
    assert!(s.evaluate(&[1.0, 1.0, 0.0]).is_err());
}

#[test]
fn flat_samples_are_helmholtz() {
    let mut rng = rng::stream(5, 0);
    for spec in [
        FieldSpec::plane_wave(2, 64, 1.0, 3),
        FieldSpec::plane_wave(3, 64, 1.0, 3),
        FieldSpec::p1_truncated(2, 20, 3),
        FieldSpec::p1_truncated(3, 14, 3),
    ] {
        let s = sample(&spec).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..spec.dim).map(|_| rng.random_range(-6.0..6.0)).collect();
            let r = helmholtz_residual(&s, &x, 1e-3);
            assert!(r.relative() <= 1e-4, "{spec:?}: {r:?}");
        }
    }
}

#[test]
fn band_limited_samples_are_not_monochromatic() {
    let s = sample(&FieldSpec::plane_wave(2, 64, 0.2, 3)).unwrap();
    let r = helmholtz_residual(&s, &[0.4, 0.1], 1e-3);
    assert!(r.relative() > 1e-2);
}

#[test]
fn pointwise_distribution_is_standard_gaussian() {
    for spec in [FieldSpec::plane_wave(2, 64, 1.0, 77), FieldSpec::p1_truncated(3, 10, 77)] {
        let x: Vec<f64> = vec![1.3; spec.dim];
        let vals: Vec<f64> = (0..10_000u64)
            .map(|t| {
                let s = sample(&spec.with_seed(rng::trial_seed(77, 1, t))).unwrap();
                s.value(&x)
            })
            .collect();
        let (_, var, skew, kurt) = moments(&vals);
        assert!((var - 1.0).abs() < 0.05, "{spec:?}: var {var}");
        assert!(skew.abs() < 0.15, "{spec:?}: skew {skew}");
        assert!(kurt.abs() < 0.3, "{spec:?}: kurt {kurt}");
    }
}

#[test]
fn covariance_examples() {
    let r0 = j0_first_zero_by_bisection();
    assert!((r0 - 2.404_825_557_695_773).abs() < 1e-12);
    let spec2 = FieldSpec::plane_wave(2, 64, 1.0, 8);
    let est = covariance_empirical(&spec2, &[0.0, r0], 3000).unwrap();
    assert!((est[0].mean - 1.0).abs() <= 3.0 * est[0].stderr);
    assert!(est[1].mean.abs() <= 3.0 * est[1].stderr, "{:?}", est[1]);

    let spec3 = FieldSpec::plane_wave(3, 256, 1.0, 8);
    let est = covariance_empirical(&spec3, &[PI], 3000).unwrap();
    assert!(est[0].mean.abs() <= 3.0 * est[0].stderr, "{:?}", est[0]);
    assert!(covariance_empirical(&spec3, &[PI], 1).is_err());
}

#[test]
fn covariance_is_stationary() {
    let spec = FieldSpec::plane_wave(2, 64, 1.0, 21);
    let rs = [0.5, 1.5, 3.0, 5.0];
    let a = covariance_empirical(&spec, &rs, 2000).unwrap();
    let b = covariance_empirical_at(&spec, &[7.0, -3.0], &[0.6, 0.8], &rs, 2000).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let combined = (x.stderr.powi(2) + y.stderr.powi(2)).sqrt();
        assert!((x.mean - y.mean).abs() < 3.0 * combined, "{x:?} vs {y:?}");
    }
}

#[test]
fn truncation_consistency_with_exact_covariance() {
    let radius = PI;
    let l = truncation_degree(radius);
    assert!(l as f64 >= radius + 10.0 * radius.cbrt());
    let rs: Vec<f64> = (0..6).map(|k| radius * k as f64 / 5.0).collect();
    for n in [2usize, 3] {
        for spec in [FieldSpec::p1_truncated(n, l, 4), FieldSpec::plane_wave(n, 64, 1.0, 4)] {
            let est = covariance_empirical(&spec, &rs, 2500).unwrap();
            for e in &est {
                let exact = covariance_exact(n, e.r, 1.0).unwrap();
                assert!((e.mean - exact).abs() <= 3.0 * e.stderr.max(1e-12), "{spec:?} {e:?} exact {exact}");
            }
        }
    }
}

#[test]
fn truncation_tail_is_negligible() {
    // Radial factor beyond the cutoff at the window radius.
    for radius in [2.0, 5.0, 10.0] {
        let l = truncation_degree(radius) + 1;
        for base in [0.0, 0.5] {
            let seq = monowave::specfun::bessel_j_scaled_sequence(base, l as usize, radius).unwrap();
            assert!(seq[l as usize].abs() < 1e-8, "R={radius}");
        }
    }
}

#[test]
fn band_limited_covariance_matches_quadrature() {
    let spec = FieldSpec { dim: 2, kind: FieldKind::PlaneWave { n_dirs: 64, alpha: 0.5, directions: DirectionScheme::IidRandom }, seed: 31 };
    let rs = [0.0, 1.0, 2.5, 4.0];
    let est = covariance_empirical(&spec, &rs, 3000).unwrap();
    for e in &est {
        let exact = covariance_exact(2, e.r, 0.5).unwrap();
        assert!((e.mean - exact).abs() <= 3.0 * e.stderr.max(1e-12), "{e:?} exact {exact}");
    }
}

#[test]
fn sphere_ensemble_covariance_is_legendre() {
    let ell = 4;
    let spec = FieldSpec::sphere(ell, 12);
    let rs = [0.0, 0.3, 0.8, 1.4];
    let est = covariance_empirical(&spec, &rs, 3000).unwrap();
    for e in &est {
        let p = monowave::specfun::zonal(ell, 3, e.r.cos()).unwrap();
        assert!((e.mean - p).abs() <= 3.0 * e.stderr.max(1e-12), "{e:?} vs {p}");
    }
}
