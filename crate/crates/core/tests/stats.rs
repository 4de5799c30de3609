use std::f64::consts::PI;

use monowave::ensemble::{sample, FieldSpec};
use monowave::nodal::testfields::TestField;
use monowave::nodal::{extract_components_2d, rasterize, TopologyType, DEFAULT_SPACING};
use monowave::rng;
use monowave::stats::*;
use proptest::prelude::*;
use rand::Rng as _;

fn ty(k: usize) -> TopologyType {
    TopologyType::ClosedSurface { genus: k as u32 }
}

fn measure_from_counts(counts: &[u64]) -> EmpiricalTopologyMeasure {
    let mut types = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        types.extend(std::iter::repeat_n(ty(k), c as usize));
    }
    empirical_measure(&types)
}

/// a/b ≤ c/d + e/f, exactly.
fn frac_le_sum(a: (u128, u128), c: (u128, u128), e: (u128, u128)) -> bool {
    a.0 * c.1 * e.1 <= (c.0 * e.1 + e.0 * c.1) * a.1
}

#[test]
fn half_l1_equals_subset_maximum_on_random_pairs() {
    let mut r = rng::stream(2024, 6);
    let mut checked = 0;
    while checked < 1000 {
        let k = r.random_range(1..=12);
        let a: Vec<u64> = (0..k).map(|_| r.random_range(0..20)).collect();
        let b: Vec<u64> = (0..k).map(|_| r.random_range(0..20)).collect();
        let (mu, nu) = (measure_from_counts(&a), measure_from_counts(&b));
        if mu.is_empty() || nu.is_empty() {
            continue;
        }
        let fast = discrepancy_exact(&mu, &nu).unwrap();
        let brute = discrepancy_brute_force(&mu, &nu).unwrap();
        assert!(fractions_equal(fast, brute), "{a:?} {b:?}: {fast:?} vs {brute:?}");
        checked += 1;
    }
}

#[test]
fn float_masses_agree_with_exact_counts() {
    let mu = measure_from_counts(&[3, 1, 0, 5]);
    let nu = measure_from_counts(&[1, 1, 7]);
    let exact = discrepancy(&mu, &nu).unwrap();
    let float = discrepancy_masses(&mu.masses(), &nu.masses()).unwrap();
    assert!((exact - float).abs() < 1e-15);
}

fn counts_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..30, 1..=8).prop_filter("non-empty measure", |v| v.iter().sum::<u64>() > 0)
}

proptest! {
    #[test]
    fn symmetric(a in counts_strategy(), b in counts_strategy()) {
        let (mu, nu) = (measure_from_counts(&a), measure_from_counts(&b));
        prop_assert!(fractions_equal(discrepancy_exact(&mu, &nu).unwrap(), discrepancy_exact(&nu, &mu).unwrap()));
    }

    #[test]
    fn identity_of_indiscernibles(a in counts_strategy(), b in counts_strategy(), k in 1u64..4) {
        let mu = measure_from_counts(&a);
        let scaled: Vec<u64> = a.iter().map(|c| c * k).collect();
        prop_assert_eq!(discrepancy_exact(&mu, &measure_from_counts(&scaled)).unwrap().0, 0);
        let nu = measure_from_counts(&b);
        let zero = discrepancy_exact(&mu, &nu).unwrap().0 == 0;
        prop_assert_eq!(zero, mu.masses() == nu.masses());
    }

    #[test]
    fn triangle_inequality(a in counts_strategy(), b in counts_strategy(), c in counts_strategy()) {
        let (x, y, z) = (measure_from_counts(&a), measure_from_counts(&b), measure_from_counts(&c));
        let xz = discrepancy_exact(&x, &z).unwrap();
        let xy = discrepancy_exact(&x, &y).unwrap();
        let yz = discrepancy_exact(&y, &z).unwrap();
        prop_assert!(frac_le_sum(xz, xy, yz));
        let d = discrepancy(&x, &z).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn measure_permutation_and_duplication_invariant(a in counts_strategy(), seed in 0u64..1000, k in 1usize..4) {
        let mu = measure_from_counts(&a);
        let mut types: Vec<TopologyType> = Vec::new();
        for (i, &c) in a.iter().enumerate() {
            types.extend(std::iter::repeat_n(ty(i), c as usize));
        }
        let mut r = rng::stream(seed, 1);
        for i in (1..types.len()).rev() {
            types.swap(i, r.random_range(0..=i));
        }
        prop_assert_eq!(empirical_measure(&types).masses(), mu.masses());
        let dup: Vec<TopologyType> = (0..k).flat_map(|_| types.clone()).collect();
        prop_assert_eq!(empirical_measure(&dup).masses(), mu.masses());
    }

    #[test]
    fn scaling_recovers_slope_under_bounded_noise(c in 0.01f64..2.0, noise in prop::collection::vec(-1.0f64..1.0, 20)) {
        let vols = [10.0, 20.0, 40.0, 80.0];
        let runs: Vec<ScalingRun> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let v = vols[i % 4];
                ScalingRun { volume: v, count: c * v + e }
            })
            .collect();
        let fit = ns_scaling(&runs).unwrap();
        // |ĉ − c| = |Σ V e| / Σ V² ≤ Σ V / Σ V²
        let bound: f64 = runs.iter().map(|r| r.volume).sum::<f64>() / runs.iter().map(|r| r.volume * r.volume).sum::<f64>();
        prop_assert!((fit.c_hat - c).abs() <= bound + 1e-12);
    }
}

#[test]
fn sine_lattice_scaling_matches_cell_count() {
    let runs: Vec<ScalingRun> = [2u32, 4, 6, 8]
        .iter()
        .map(|&m| {
            let tf = TestField::SineLattice { cells: m };
            let g = rasterize(&tf, &tf.window(), DEFAULT_SPACING).unwrap();
            let interior = extract_components_2d(&g).iter().filter(|c| !c.touches_boundary).count();
            assert_eq!(interior as u32, m * m / 2);
            ScalingRun { volume: tf.window().volume(), count: interior as f64 }
        })
        .collect();
    let fit = ns_scaling(&runs).unwrap();
    let c = 1.0 / (2.0 * PI * PI);
    assert!((fit.c_hat - c).abs() < 1e-9 * c);
    assert!((fit.exponent - 1.0).abs() < 1e-9);
    assert!(fit.r_squared > 1.0 - 1e-12);
}

#[test]
fn planar_measures_have_zero_discrepancy() {
    let spec = FieldSpec::plane_wave(2, 32, 1.0, 3);
    let report = concentration_experiment(&spec, &[6.0 * PI, 10.0 * PI], 20, DEFAULT_SPACING).unwrap();
    for (row, ds) in report.rows.iter().zip(&report.discrepancies) {
        assert!(row.trials_used > 0);
        assert!(ds.iter().all(|&d| d == 0.0));
    }
    assert_eq!(report.reference.len(), 1);
    assert_eq!(report.reference[0].topology, "circle");
}

#[test]
fn replicated_deterministic_field_has_zero_discrepancy() {
    let s = sample(&FieldSpec::plane_wave(2, 64, 1.0, 12)).unwrap();
    let side = 20.0 * PI;
    let window = monowave::field::Window::centered(&[side; 2]);
    let t = trial_topology(&s, &window, DEFAULT_SPACING).unwrap();
    assert!(!t.types.is_empty());
    let report = concentration_from_trials(&[side], 2, &[vec![t; 20]]).unwrap();
    assert!(report.discrepancies[0].iter().all(|&d| d == 0.0));
}

#[test]
fn experiments_reject_bad_input() {
    let spec = FieldSpec::plane_wave(2, 8, 1.0, 3);
    assert!(matches!(concentration_experiment(&spec, &[10.0], 5, DEFAULT_SPACING), Err(StatsError::InsufficientData(_))));
    let runs = scaling_experiment(&spec, &[8.0, 10.0, 12.0], 2, DEFAULT_SPACING).unwrap();
    assert!(matches!(ns_scaling(&runs), Err(StatsError::InsufficientData(_))));
}
