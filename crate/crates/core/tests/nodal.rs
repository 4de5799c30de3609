use std::f64::consts::PI;

use monowave::ensemble::{sample, FieldSpec};
use monowave::field::{Field, FnField, Window};
use monowave::nodal::export::{obj_string, write_components};
use monowave::nodal::sphere::{extract_components_sphere, rasterize_sphere_sample, default_sphere_spacing};
use monowave::nodal::testfields::TestField;
use monowave::nodal::*;

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
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn interior_types(components: &[NodalComponent]) -> Vec<TopologyType> {
    let mut t: Vec<TopologyType> =
        components.iter().filter(|c| !c.touches_boundary).map(|c| classify(c).unwrap()).collect();
    t.sort();
    t
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn cosine_zero_lines() {
    let f = FnField::new(2, |x: &[f64]| x[0].cos());
    let g = rasterize(&f, &Window::new(vec![0.0, 0.0], vec![4.0 * PI, 4.0 * PI]), DEFAULT_SPACING).unwrap();
    let comps = extract_components_2d(&g);
    assert_eq!(comps.len(), 4);
    for (k, c) in comps.iter().enumerate() {
        assert!(c.touches_boundary);
        let target = PI / 2.0 + PI * k as f64;
        for v in c.vertices() {
            assert!((v[0] - target).abs() < 0.01, "{v:?} vs {target}");
        }
    }
}

#[test]
fn linear_field_gives_one_open_component() {
    let f = FnField::new(2, |x: &[f64]| x[0]);
    let g = rasterize(&f, &Window::cube(2, 1.05), 0.1).unwrap();
    let comps = extract_components_2d(&g);
    assert_eq!(comps.len(), 1);
    assert!(comps[0].touches_boundary);
    assert!(matches!(classify(&comps[0]), Err(NodalError::Boundary)));
}

#[test]
fn constant_sign_grids_are_empty() {
    let g = rasterize(&FnField::new(2, |_: &[f64]| 1.0), &Window::cube(2, 1.0), 0.1).unwrap();
    assert!(extract_components_2d(&g).is_empty());
    let g = rasterize(&FnField::new(3, |_: &[f64]| -1.0), &Window::cube(3, 1.0), 0.2).unwrap();
    assert!(extract_components_3d(&g).unwrap().is_empty());
}

#[test]
fn degenerate_window_is_a_resolution_error() {
    let f = FnField::new(2, |x: &[f64]| x[0]);
    let err = rasterize(&f, &Window::new(vec![0.0, 0.0], vec![1.0, 0.0]), 0.1).unwrap_err();
    assert!(matches!(err, NodalError::Resolution(_)));
}

#[test]
fn bessel_ring_components() {
    let z1 = bisect(j0_series, 2.0, 3.0);
    let z2 = bisect(j0_series, 5.0, 6.0);
    let z3 = bisect(j0_series, 8.0, 9.0);
    assert!((z1 - 2.404_825_557_695_773).abs() < 1e-12);
    // the third zero circle clears the corners of the square
    assert!(z2 < 6.0 && z3 > 6.0 * 2f64.sqrt());

    let tf = TestField::BesselRing;
    let g = rasterize(&tf, &tf.window(), DEFAULT_SPACING).unwrap();
    let comps = extract_components_2d(&g);
    let (interior, boundary) = count_split(&comps);
    assert_eq!(interior, 2);
    assert_eq!(boundary, 0);
    let mut radii: Vec<f64> = comps
        .iter()
        .filter(|c| !c.touches_boundary)
        .map(|c| {
            let rs: Vec<f64> = c.vertices().map(norm).collect();
            rs.iter().sum::<f64>() / rs.len() as f64
        })
        .collect();
    radii.sort_by(f64::total_cmp);
    assert!((radii[0] - z1).abs() < 0.01, "{radii:?}");
    assert!((radii[1] - z2).abs() < 0.01, "{radii:?}");
    for c in comps.iter().filter(|c| !c.touches_boundary) {
        assert!(c.is_closed_polyline());
        assert_eq!(classify(c).unwrap(), TopologyType::Circle);
    }
}

#[test]
fn sine_lattice_islands() {
    for cells in [2u32, 4, 6] {
        let tf = TestField::SineLattice { cells };
        let g = rasterize(&tf, &tf.window(), DEFAULT_SPACING).unwrap();
        let comps = extract_components_2d(&g);
        assert_eq!(count_split(&comps), ((cells * cells / 2) as usize, 0));
    }
}

#[test]
fn sine_sheet_touches_boundary() {
    let f = FnField::new(3, |x: &[f64]| x[0].sin());
    let g = rasterize(&f, &Window::new(vec![0.0; 3], vec![2.0 * PI - 0.1; 3]), DEFAULT_SPACING).unwrap();
    let comps = extract_components_3d(&g).unwrap();
    assert_eq!(comps.len(), 1);
    assert!(comps[0].touches_boundary);
    for v in comps[0].vertices() {
        assert!((v[0] - PI).abs() < 1e-2);
    }
}

#[test]
fn sinc_sphere_is_one_oriented_sphere() {
    let tf = TestField::SincSphere;
    let g = rasterize(&tf, &tf.window(), DEFAULT_SPACING).unwrap();
    let comps = extract_components_3d(&g).unwrap();
    assert_eq!(interior_types(&comps), tf.expected_interior());
    let sphere = comps.iter().find(|c| !c.touches_boundary).unwrap();
    let Geometry::Mesh(m) = &sphere.geometry else { panic!("mesh expected") };
    assert_eq!(euler_characteristic(m).unwrap(), 2);
    assert!(m.is_consistently_oriented());
    // normals point to the negative side; the inside is positive
    let (vol, ball) = (m.signed_volume(), 4.0 / 3.0 * PI * PI.powi(3));
    assert!((vol + ball).abs() < 0.03 * ball, "{vol}");
    for v in sphere.vertices() {
        assert!((norm(v) - PI).abs() < 0.05, "{v:?}");
    }
}

#[test]
fn torus_field_has_genus_one() {
    let tf = TestField::Torus;
    for h in [0.15, 0.1] {
        let g = rasterize(&tf, &tf.window(), h).unwrap();
        let comps = extract_components_3d(&g).unwrap();
        assert_eq!(interior_types(&comps), tf.expected_interior());
    }
}

#[test]
fn refinement_stability_on_test_fields() {
    for tf in [TestField::BesselRing, TestField::SincSphere, TestField::SineLattice { cells: 4 }, TestField::Torus] {
        let coarse = if tf == TestField::Torus { 0.15 } else { DEFAULT_SPACING };
        let mut seen = Vec::new();
        for h in [coarse, coarse / 2.0] {
            let g = rasterize(&tf, &tf.window(), h).unwrap();
            let comps = extract_components(&g).unwrap();
            let types = interior_types(&comps);
            assert_eq!(types, tf.expected_interior(), "{tf:?} at spacing {h}");
            seen.push(types);
        }
        assert_eq!(seen[0], seen[1]);
    }
}

#[test]
fn level_set_sanity_on_random_samples() {
    for (dim, half) in [(2usize, 12.0), (3, 5.0)] {
        let s = sample(&FieldSpec::plane_wave(dim, 64, 1.0, 99)).unwrap();
        let w = Window::cube(dim, half);
        let g = rasterize_sample(&s, &w, DEFAULT_SPACING).unwrap();
        let comps = extract_components(&g).unwrap();
        assert!(!comps.is_empty());
        for c in &comps {
            for v in c.vertices() {
                let lip = norm(&s.gradient(v)).max(1.0);
                assert!(s.value(v).abs() <= lip * g.spacing, "{v:?}");
            }
        }
    }
}

#[test]
fn random_3d_samples_classify_cleanly() {
    for seed in 0..3 {
        let s = sample(&FieldSpec::plane_wave(3, 128, 1.0, seed)).unwrap();
        let g = rasterize_sample(&s, &Window::cube(3, 2.0 * PI), DEFAULT_SPACING).unwrap();
        let comps = extract_components_3d(&g).unwrap();
        for c in comps.iter().filter(|c| !c.touches_boundary) {
            let Geometry::Mesh(m) = &c.geometry else { unreachable!() };
            assert!(m.is_consistently_oriented());
            let chi = euler_characteristic(m).unwrap();
            assert!(chi % 2 == 0 && chi <= 2);
            assert!(matches!(classify(c).unwrap(), TopologyType::ClosedSurface { .. }));
        }
        // additivity over the closed components
        let closed: Vec<&TriMesh> = comps
            .iter()
            .filter(|c| !c.touches_boundary)
            .map(|c| match &c.geometry {
                Geometry::Mesh(m) => m,
                _ => unreachable!(),
            })
            .collect();
        if closed.len() >= 2 {
            let joined = closed[0].union(closed[1]);
            assert_eq!(
                joined.euler_characteristic().unwrap(),
                closed[0].euler_characteristic().unwrap() + closed[1].euler_characteristic().unwrap()
            );
        }
    }
}

#[test]
fn extraction_is_deterministic() {
    let s = sample(&FieldSpec::plane_wave(3, 64, 1.0, 5)).unwrap();
    let w = Window::cube(3, 6.0);
    let a = extract_components_3d(&rasterize_sample(&s, &w, DEFAULT_SPACING).unwrap()).unwrap();
    let b = extract_components_3d(&rasterize_sample(&s, &w, DEFAULT_SPACING).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn degree_one_sphere_field_is_one_great_circle() {
    let s = sample(&FieldSpec::sphere(1, 4)).unwrap();
    let g = rasterize_sphere_sample(&s, default_sphere_spacing(1)).unwrap();
    let comps = extract_components_sphere(&g);
    assert_eq!(comps.len(), 1);
    assert_eq!(classify(&comps[0]).unwrap(), TopologyType::Circle);
    let c = &s.coefficients;
    let u = [c[2], c[0], c[1]];
    let un = norm(&u);
    for v in comps[0].vertices() {
        let d = (v[0] * u[0] + v[1] * u[1] + v[2] * u[2]) / un;
        assert!(d.abs() < 1e-2, "{d}");
    }
}

#[test]
fn sphere_components_are_closed_circles() {
    let s = sample(&FieldSpec::sphere(8, 2)).unwrap();
    let g = rasterize_sphere_sample(&s, default_sphere_spacing(8)).unwrap();
    let comps = extract_components_sphere(&g);
    assert!(!comps.is_empty());
    for c in &comps {
        assert_eq!(classify(c).unwrap(), TopologyType::Circle);
    }
    assert!(rasterize_sphere_sample(&s, 0.5).is_err());
}

#[test]
fn export_writes_obj_and_sidecar() {
    let tf = TestField::SincSphere;
    let g = rasterize(&tf, &tf.window(), DEFAULT_SPACING).unwrap();
    let comps = extract_components_3d(&g).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_components(dir.path(), "sinc", &comps, None, Some(&tf.window()), g.spacing).unwrap();
    assert!(files.iter().any(|p| p.extension().is_some_and(|e| e == "obj")));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sinc_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["interior_components"], 1);
    let interior = comps.iter().position(|c| !c.touches_boundary).unwrap();
    let obj = std::fs::read_to_string(dir.path().join(format!("sinc_{interior}.obj"))).unwrap();
    let Geometry::Mesh(m) = &comps[interior].geometry else { unreachable!() };
    let header = format!("# monowave nodal component {interior}\n# manifest: sinc_manifest.json\n");
    assert_eq!(obj, header + &obj_string(m));
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), m.triangles.len());
}
