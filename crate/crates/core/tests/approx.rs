use std::f64::consts::PI;

use monowave::approx::*;
use monowave::ensemble::{sample, with_antipodes, FieldSpec, WaveSample};
use monowave::field::{helmholtz_residual, Field, FnField, Window};
use monowave::nodal::{classify, extract_components, rasterize, rasterize_sample, TopologyType, DEFAULT_SPACING};
use monowave::rng;
use monowave::specfun::{harmonic_dimension, sphere_volume, HarmonicIndex};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng as _;

fn j0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -(0.25 * x * x) / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn interior_types(f: &dyn Field, w: &Window) -> Vec<TopologyType> {
    let g = rasterize(f, w, DEFAULT_SPACING).unwrap();
    let mut t: Vec<TopologyType> = extract_components(&g).unwrap().iter().filter_map(|c| classify(c).ok()).collect();
    t.sort();
    t
}

#[test]
fn direction_sets() {
    let d = equidistributed_directions(2, 4);
    assert_eq!(d.len(), 4);
    for p in with_antipodes(&d) {
        let k = (p[1].atan2(p[0]) / (PI / 4.0)).rem_euclid(8.0);
        assert!((k - k.round()).abs() < 1e-12);
    }
    let one = with_antipodes(&equidistributed_directions(3, 1));
    assert_eq!(one.len(), 2);
    assert!(one[0].iter().zip(&one[1]).all(|(a, b)| a == &-b));

    let dense = with_antipodes(&equidistributed_directions(3, 2000));
    assert!(cap_discrepancy(&dense, 50, 9) < 0.05);
    let coarse = cap_discrepancy(&with_antipodes(&equidistributed_directions(3, 20)), 50, 9);
    let fine = cap_discrepancy(&with_antipodes(&equidistributed_directions(3, 500)), 50, 9);
    assert!(fine < coarse, "{fine} vs {coarse}");
}

#[test]
fn riemann_sum_of_constant_gives_bessel() {
    let idx = HarmonicIndex::new(1, 0, 1).unwrap();
    let (t, err) = p1_to_t1(idx, 256, 10.0).unwrap();
    assert!(err < 1e-3);
    // t → Y₀ J₀ with Y₀ = 1/√(2π); with Y ≡ 1 and dσ this is 2π J₀
    let y0 = 1.0 / (2.0 * PI).sqrt();
    for p in ball_samples(2, 10.0).iter().step_by(7) {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        assert!((2.0 * PI * t.value(p) / y0 - 2.0 * PI * j0_series(r)).abs() < 1e-3);
    }
}

#[test]
fn odd_degree_is_exactly_odd() {
    for ds in [1u8, 2] {
        let idx = HarmonicIndex::new(ds, 1, 1).unwrap();
        let (t, _) = p1_to_t1(idx, 64, 5.0).unwrap();
        let mut r = rng::stream(4, 4);
        for _ in 0..200 {
            let x: Vec<f64> = (0..t.dim).map(|_| r.random_range(-20.0..20.0)).collect();
            let mx: Vec<f64> = x.iter().map(|v| -v).collect();
            assert_eq!(t.value(&mx), -t.value(&x));
        }
    }
}

#[test]
fn doubling_strictly_improves_degree_two_in_space() {
    let idx = HarmonicIndex::new(2, 2, 3).unwrap();
    let errs: Vec<f64> = [16, 32, 64, 128, 256, 512].iter().map(|&n| p1_to_t1(idx, n, 10.0).unwrap().1).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[5] < 1e-2);
}

#[test]
fn elements_solve_helmholtz() {
    let mut r = rng::stream(8, 8);
    let idx = HarmonicIndex::new(2, 3, 2).unwrap();
    let (t, _) = p1_to_t1(idx, 128, 1.0).unwrap();
    let p2 = P1Element::from_fn(2, 6, |l, m| 1.0 / (1.0 + l as f64) * if m == 1 { 1.0 } else { -0.7 }).unwrap();
    let p3 = P1Element::from_fn(3, 5, |l, m| (0.8f64).powi(l as i32) * (m as f64).cos()).unwrap();
    let fields: [&dyn Field; 3] = [&t, &p2, &p3];
    for f in fields {
        for _ in 0..20 {
            let x: Vec<f64> = (0..f.dim()).map(|_| r.random_range(-6.0..6.0)).collect();
            let res = helmholtz_residual(f, &x, 1e-3);
            assert!(res.relative() < 1e-4, "{res:?}");
        }
    }
}

#[test]
fn truncation_of_finite_stream_is_exact() {
    let el = P1Element::from_fn(3, 4, |l, _| 1.0 + l as f64).unwrap();
    for order in [0, 1] {
        let t = truncate_p1(&el, 4, 7.0, order, 0.0).unwrap();
        assert_eq!(t.bound, 0.0);
        assert_eq!(t.element, el);
    }
}

/// max over the grid points of the disk |x| ≤ k of |g| and of the FD gradient norm of g
fn grid_max(g: &dyn Field, k: f64, m: usize) -> (f64, f64) {
    let mut vmax: f64 = 0.0;
    let mut gmax: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let x = [-k + 2.0 * k * i as f64 / (m - 1) as f64, -k + 2.0 * k * j as f64 / (m - 1) as f64];
            if x[0].hypot(x[1]) > k {
                continue;
            }
            vmax = vmax.max(g.value(&x).abs());
            let gr = g.gradient(&x);
            gmax = gmax.max(gr[0].hypot(gr[1]));
        }
    }
    (vmax, gmax)
}

#[test]
fn single_tail_term_bound_is_its_envelope() {
    let (l, k) = (5u32, 6.0);
    let el = P1Element::from_fn(2, l + 1, |ell, m| if ell == l + 1 && m == 2 { 0.7 } else { 0.0 }).unwrap();
    let t = truncate_p1(&el, l, k, 1, f64::INFINITY).unwrap();
    let env = radial_envelope_for_test(l + 1, k);
    let y = (harmonic_dimension(1, l + 1) as f64 / sphere_volume(2)).sqrt();
    assert!((t.c0_bound - 0.7 * y * env.0).abs() < 1e-15);
    let tail = FnField::new(2, |x: &[f64]| el.value(x) - t.element.value(x));
    let (vmax, gmax) = grid_max(&tail, k, 200);
    assert!(vmax <= t.c0_bound, "{vmax} > {}", t.c0_bound);
    assert!(gmax <= t.gradient_bound, "{gmax} > {}", t.gradient_bound);
    // not wildly loose: the cap |J₆| ≤ 1 is active here, the true maximum is ≈ 0.3
    assert!(vmax > t.c0_bound / 10.0);
}

fn radial_envelope_for_test(ell: u32, k: f64) -> (f64, f64) {
    let e = monowave::approx::radial_envelope(2, ell, k);
    (e.value, e.derivative)
}

#[test]
fn geometric_decay_bound_holds_on_grid() {
    let mut r = rng::stream(17, 3);
    let el = P1Element::from_fn(2, 40, |l, _| 0.6f64.powi(l as i32) * r.random_range(-1.0..1.0)).unwrap();
    let k = 8.0;
    let t = truncate_p1(&el, 12, k, 1, f64::INFINITY).unwrap();
    let tail = FnField::new(2, |x: &[f64]| el.value(x) - t.element.value(x));
    let (vmax, gmax) = grid_max(&tail, k, 200);
    assert!(vmax <= t.c0_bound && gmax <= t.gradient_bound, "{vmax} {gmax} vs {t:?}");
    assert!(matches!(truncate_p1(&el, 12, k, 1, t.bound / 2.0), Err(ApproxError::CutoffTooSmall { .. })));
    assert!(truncate_p1(&el, 12, k, 0, t.c0_bound).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn certified_bound_never_exceeded(
        dim in 2usize..=3, decay in 0.2f64..0.9, cutoff in 0u32..8, k in 0.5f64..9.0, seed in 0u64..1000,
    ) {
        let mut r = rng::stream(seed, 5);
        let el = P1Element::from_fn(dim, cutoff + 10, |l, _| decay.powi(l as i32) * r.random_range(-1.0..1.0)).unwrap();
        let t = truncate_p1(&el, cutoff, k, 1, f64::INFINITY).unwrap();
        let tail = FnField::new(dim, |x: &[f64]| el.value(x) - t.element.value(x));
        for p in ball_samples(dim, k).iter().step_by(11) {
            prop_assert!(tail.value(p).abs() <= t.c0_bound * (1.0 + 1e-10) + 1e-14);
            let g: f64 = tail.gradient(p).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(g <= t.gradient_bound * (1.0 + 1e-6) + 1e-8);
        }
    }
}

#[test]
fn ball_eigenfunctions() {
    let (h3, l3) = ball_eigenfunction(3).unwrap();
    assert!((l3 - PI).abs() < 1e-12);
    let c = h3.value(&[0.3, 0.0, 0.0]) / (0.3f64.sin() / 0.3);
    for r in [0.5, 1.0, 2.0, 3.0, 4.0] {
        assert!((h3.value(&[0.0, r, 0.0]) - c * r.sin() / r).abs() < 1e-13);
    }
    let (h2, l2) = ball_eigenfunction(2).unwrap();
    let oracle = bisect(j0_series, 2.0, 3.0);
    assert!((l2 - oracle).abs() < 1e-10 && (l2 - 2.404825).abs() < 1e-6);
    assert!(h2.value(&[l2, 0.0]).abs() < 1e-12);
    assert!((h2.value(&[0.0, 0.0]) - 1.0).abs() < 1e-14);
    for r in [0.0, 0.5, 1.5, 2.3] {
        assert!(h2.value(&[r * 0.6, r * 0.8]) > 0.0);
    }
    assert_eq!(interior_types(&h2, &Window::cube(2, l2 + 1.0)), vec![TopologyType::Circle]);
    assert_eq!(interior_types(&h3, &Window::cube(3, l3 + 1.0)), vec![TopologyType::ClosedSurface { genus: 0 }]);
}

#[test]
fn isotopy_stability_on_ball_eigenfunction() {
    let (h, l) = ball_eigenfunction(2).unwrap();
    let w = Window::cube(2, l + 1.0);
    // unit-sup perturbation: a random monochromatic wave normalized on the window
    let s = sample(&FieldSpec::plane_wave(2, 16, 1.0, 21)).unwrap();
    let p = T1Element::from_wave_sample(&s).unwrap();
    let g = rasterize(&p, &w, 0.05).unwrap();
    let sup = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = p.scaled(1.0 / sup);

    let rep = isotopy_stability(&h, &p, &w, DEFAULT_SPACING, &[0.0, 1e-3, 1e-2, -1e-3, 2.0]).unwrap();
    assert_eq!(rep.base_types, vec![TopologyType::Circle]);
    assert!(rep.entries[0].preserved && rep.entries[1].preserved && rep.entries[3].preserved);
    assert!(rep.margin.value_margin > 1e-3);
    assert!(!rep.entries[4].preserved);
    assert!(rep.max_stable_eps.unwrap() < 2.0);

    let flat = FnField::new(2, |_: &[f64]| 1.0);
    assert!(matches!(isotopy_stability(&flat, &p, &w, DEFAULT_SPACING, &[0.0]), Err(ApproxError::NoComponent)));
}

#[test]
fn isotopy_stability_is_monotone_on_test_fields() {
    use monowave::nodal::testfields::TestField;
    let bump = T1Element::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]], vec![Complex64::new(0.25, 0.0); 2]).unwrap();
    let sched: Vec<f64> = (0..8).map(|i| 0.02 * 2f64.powi(i)).collect();
    for tf in [TestField::SincSphere, TestField::Torus] {
        let rep = isotopy_stability(&tf, &bump, &tf.window(), DEFAULT_SPACING, &sched).unwrap();
        assert!(rep.entries[0].preserved);
        let first_lost = rep.entries.iter().position(|e| !e.preserved).unwrap_or(sched.len());
        assert!(rep.entries[first_lost..].iter().all(|e| !e.preserved));
    }
}

#[test]
fn witnesses() {
    let w2 = t1_witness_for_sphere(2, 256).unwrap();
    assert_eq!(w2.interior, vec![TopologyType::Circle]);
    assert!(w2.measured_error < w2.margin.value_margin);
    let w3 = t1_witness_for_sphere(3, 512).unwrap();
    assert_eq!(w3.interior, vec![TopologyType::ClosedSurface { genus: 0 }]);
    assert!(w3.measured_error < w3.margin.value_margin);
    match t1_witness_for_sphere(2, 1) {
        Err(ApproxError::InsufficientN { n_dirs: 1, error, margin }) => assert!(error > margin),
        other => panic!("expected an insufficient-N error, got {other:?}"),
    }

    // the witness is an ordinary plane-wave sample
    let s = WaveSample::from_json(&w2.element.to_wave_sample().to_json()).unwrap();
    for p in ball_samples(2, 3.0).iter().step_by(5) {
        assert!((s.evaluate(p).unwrap() - w2.element.value(p)).abs() < 1e-12);
    }
    let g = rasterize_sample(&s, &w2.window, w2.spacing).unwrap();
    let types: Vec<TopologyType> = extract_components(&g).unwrap().iter().filter_map(|c| classify(c).ok()).collect();
    assert_eq!(types, vec![TopologyType::Circle]);
    assert_eq!(T1Element::from_wave_sample(&s).unwrap().weights.len(), 256);
}
