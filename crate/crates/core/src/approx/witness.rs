use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dim, nu_of, ApproxError, P1Element, T1Element};
use crate::ensemble::{equidistributed_directions, random_direction, with_antipodes};
use crate::field::{Field, Perturbed, Window};
use crate::nodal::{classify, extract_components, rasterize, NodalError, TopologyType, DEFAULT_SPACING};
use crate::rng;
use crate::specfun::{
    bessel_j_scaled_sequence, first_zero, ft_constant, harmonics_upto_unchecked, minus_i_pow, sphere_volume,
    BesselOrder, HarmonicIndex,
};

/// Radii and directions of the sample set used for sup-errors on |x| ≤ K:
/// 81 radii × 128 angles in the plane, 41 radii × 600 Fibonacci directions
/// in space.
fn ball_grid(n: usize, radius: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (nr, dirs) = if n == 2 {
        (80, (0..128).map(|a| {
            let th = 2.0 * std::f64::consts::PI * a as f64 / 128.0;
            vec![th.cos(), th.sin()]
        }).collect())
    } else {
        (40, with_antipodes(&equidistributed_directions(3, 300)))
    };
    ((0..=nr).map(|i| radius * i as f64 / nr as f64).collect(), dirs)
}

/// Deterministic sample points of the closed ball |x| ≤ `radius` in ℝⁿ.
pub fn ball_samples(n: usize, radius: f64) -> Vec<Vec<f64>> {
    let (radii, dirs) = ball_grid(n, radius);
    let mut pts = vec![vec![0.0; n]];
    for &r in &radii[1..] {
        pts.extend(dirs.iter().map(|d| d.iter().map(|v| v * r).collect::<Vec<f64>>()));
    }
    pts
}

/// max |a − b| over the points.
pub fn sup_error_on_samples(a: &dyn Field, b: &dyn Field, points: &[Vec<f64>]) -> f64 {
    points.par_iter().map(|p| (a.value(p) - b.value(p)).abs()).reduce(|| 0.0, f64::max)
}

/// The average `1/(2N) Σ_j (e^{−i⟨x,ξ_j⟩} + (−1)^ℓ e^{i⟨x,ξ_j⟩}) Y(ξ_j)` over
/// [`equidistributed_directions`], rotated by i^ℓ to be real:
/// w_j = Y(ξ_j) (−i)^ℓ / (2N). As N grows it tends to the transform of Y
/// against the probability measure dσ/vol(S^{n−1}), i.e.
/// (2π)^{n/2} Y(x̂) J_{ℓ+ν}(|x|)/|x|^ν / vol(S^{n−1}); the returned error is
/// the measured sup-distance to that limit on |x| ≤ `radius`.
pub fn p1_to_t1(idx: HarmonicIndex, n_dirs: usize, radius: f64) -> Result<(T1Element, f64), ApproxError> {
    let n = idx.ambient_dim();
    check_dim(n)?;
    if n_dirs == 0 {
        return Err(ApproxError::Invalid("N must be at least 1".into()));
    }
    let reps = equidistributed_directions(n, n_dirs);
    let scale = 1.0 / (2.0 * n_dirs as f64);
    let phase = minus_i_pow(idx.ell);
    let weights = reps
        .iter()
        .map(|xi| phase * (scale * harmonics_upto_unchecked(idx.dim_sphere, idx.ell, xi)[idx.flat()]))
        .collect();
    let t = T1Element::new(reps, weights)?;

    let (radii, dirs) = ball_grid(n, radius);
    let konst = ft_constant(n) / sphere_volume(n);
    let ys: Vec<f64> = dirs.iter().map(|d| harmonics_upto_unchecked(idx.dim_sphere, idx.ell, d)[idx.flat()]).collect();
    let errs: Vec<f64> = radii
        .par_iter()
        .map(|&r| -> Result<f64, ApproxError> {
            let prof = bessel_j_scaled_sequence(nu_of(n), idx.ell as usize, r)?[idx.ell as usize];
            let mut worst: f64 = 0.0;
            for (d, y) in dirs.iter().zip(&ys) {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                // at r = 0 the angular factor is irrelevant except for ℓ = 0, where Y is constant
                worst = worst.max((t.value(&x) - konst * y * prof).abs());
            }
            Ok(worst)
        })
        .collect::<Result<_, _>>()?;
    Ok((t, errs.into_iter().fold(0.0, f64::max)))
}

/// h(x) = J_ν(|x|)/|x|^ν as a degree-0 element, and its first zero λ: h is
/// positive on the open ball of radius λ and vanishes on its boundary.
pub fn ball_eigenfunction(n: usize) -> Result<(P1Element, f64), ApproxError> {
    check_dim(n)?;
    let lambda = first_zero(BesselOrder::for_dimension(n))?;
    // the degree-0 basis element is Y₀ · h with Y₀ = 1/√vol
    let h = P1Element::new(n, 0, vec![sphere_volume(n).sqrt()])?;
    Ok((h, lambda))
}

/// Gradient margin of a field around the closed interior components of its
/// zero set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotopyMargin {
    /// min |∇f| over the zero-set vertices and their offsets ±τ along the normal
    pub gradient_min: f64,
    /// τ (the grid spacing)
    pub tube_width: f64,
    /// gradient_min · τ: a sup-norm perturbation below this cannot move the
    /// zero set out of the τ-tube
    pub value_margin: f64,
    pub vertices: usize,
}

struct Extracted {
    /// sorted interior types
    interior: Vec<TopologyType>,
    boundary: usize,
    components: Vec<crate::nodal::NodalComponent>,
}

fn extract(field: &dyn Field, window: &Window, spacing: f64) -> Result<Extracted, ApproxError> {
    let grid = rasterize(field, window, spacing)?;
    let comps = extract_components(&grid)?;
    let mut interior = Vec::new();
    let mut boundary = 0;
    let mut kept = Vec::new();
    for c in comps {
        match classify(&c) {
            Ok(t) => {
                interior.push(t);
                kept.push(c);
            }
            Err(NodalError::Boundary) => boundary += 1,
            Err(e) => return Err(e.into()),
        }
    }
    interior.sort();
    Ok(Extracted { interior, boundary, components: kept })
}

/// Measured margin of `base` on its closed interior components in `window`.
pub fn isotopy_margin(base: &dyn Field, window: &Window, spacing: f64) -> Result<IsotopyMargin, ApproxError> {
    let ex = extract(base, window, spacing)?;
    if ex.components.is_empty() {
        return Err(ApproxError::NoComponent);
    }
    let verts: Vec<Vec<f64>> = ex.components.iter().flat_map(|c| c.vertices().map(|v| v.to_vec())).collect();
    let tau = spacing;
    let gmin = verts
        .par_iter()
        .map(|v| {
            let g = base.gradient(v);
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let mut m = norm;
            for s in [-tau, tau] {
                let p: Vec<f64> = v.iter().zip(&g).map(|(x, gk)| x + s * gk / norm).collect();
                m = m.min(base.gradient(&p).iter().map(|x| x * x).sum::<f64>().sqrt());
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(IsotopyMargin { gradient_min: gmin, tube_width: tau, value_margin: gmin * tau, vertices: verts.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub eps: f64,
    pub preserved: bool,
    pub interior: Vec<TopologyType>,
    pub boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotopyReport {
    pub base_types: Vec<TopologyType>,
    /// Largest |ε| in the schedule at which the interior type multiset is
    /// unchanged (None if no entry preserves it).
    pub max_stable_eps: Option<f64>,
    pub margin: IsotopyMargin,
    /// In schedule order.
    pub entries: Vec<StabilityEntry>,
}

/// Extracts the zero set of `base + ε·perturbation` for every ε of the
/// schedule and compares the sorted multiset of interior types with that of
/// `base`. A schedule where preservation fails at some |ε₁| but holds at a
/// larger |ε₂| of the same sign is reported as a resolution failure.
pub fn isotopy_stability(
    base: &dyn Field,
    perturbation: &dyn Field,
    window: &Window,
    spacing: f64,
    eps_schedule: &[f64],
) -> Result<IsotopyReport, ApproxError> {
    if base.dim() != perturbation.dim() || base.dim() != window.dim() {
        return Err(ApproxError::Invalid("base, perturbation and window dimensions differ".into()));
    }
    if eps_schedule.iter().any(|e| !e.is_finite()) {
        return Err(ApproxError::Invalid("non-finite ε in the schedule".into()));
    }
    let reference = extract(base, window, spacing)?;
    if reference.interior.is_empty() {
        return Err(ApproxError::NoComponent);
    }
    let margin = isotopy_margin(base, window, spacing)?;
    let entries: Vec<StabilityEntry> = eps_schedule
        .par_iter()
        .map(|&eps| {
            let f = Perturbed { base, perturbation, eps };
            let ex = extract(&f, window, spacing)?;
            Ok(StabilityEntry { eps, preserved: ex.interior == reference.interior, interior: ex.interior, boundary: ex.boundary })
        })
        .collect::<Result<_, ApproxError>>()?;

    for sign in [1.0, -1.0] {
        let mut side: Vec<&StabilityEntry> = entries.iter().filter(|e| e.eps * sign > 0.0).collect();
        side.sort_by(|a, b| a.eps.abs().total_cmp(&b.eps.abs()));
        if let Some(lost) = side.iter().position(|e| !e.preserved) {
            if let Some(back) = side[lost..].iter().find(|e| e.preserved) {
                return Err(ApproxError::Resolution(format!(
                    "types lost at eps = {} but preserved again at eps = {}",
                    side[lost].eps, back.eps
                )));
            }
        }
    }
    let max_stable_eps = entries.iter().filter(|e| e.preserved).map(|e| e.eps.abs()).reduce(f64::max);
    Ok(IsotopyReport { base_types: reference.interior, max_stable_eps, margin, entries })
}

/// A verified trigonometric sum whose zero set has a closed component of
/// spherical type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub dim: usize,
    pub n_dirs: usize,
    pub element: T1Element,
    /// radius of the sphere (first zero of J_ν)
    pub lambda: f64,
    pub window: Window,
    pub spacing: f64,
    /// sup |T − h| on the ball circumscribing the window
    pub measured_error: f64,
    pub margin: IsotopyMargin,
    /// sorted interior types of T's zero set in the window
    pub interior: Vec<TopologyType>,
}

/// T₁ element approximating the ball eigenfunction h on |x|∞ ≤ λ + 1,
/// normalized to approximate h itself; verified by extracting its zero set.
pub fn t1_witness_for_sphere(n: usize, n_dirs: usize) -> Result<Witness, ApproxError> {
    check_dim(n)?;
    let (h, lambda) = ball_eigenfunction(n)?;
    let window = Window::cube(n, lambda + 1.0);
    let spacing = DEFAULT_SPACING;
    let radius = (n as f64).sqrt() * (lambda + 1.0);
    let idx = HarmonicIndex::new((n - 1) as u8, 0, 1)?;
    let (t, _) = p1_to_t1(idx, n_dirs, radius)?;
    // the limit is (2π)^{n/2} Y₀ h / vol with Y₀ = 1/√vol
    let t = t.scaled(sphere_volume(n).powf(1.5) / ft_constant(n));
    let measured_error = sup_error_on_samples(&t, &h, &ball_samples(n, radius));
    let margin = isotopy_margin(&h, &window, spacing)?;
    if !(measured_error < margin.value_margin) {
        return Err(ApproxError::InsufficientN { n_dirs, error: measured_error, margin: margin.value_margin });
    }
    let ex = extract(&t, &window, spacing)?;
    let want = if n == 2 { TopologyType::Circle } else { TopologyType::ClosedSurface { genus: 0 } };
    if ex.interior != vec![want.clone()] {
        return Err(ApproxError::Verification(format!(
            "expected exactly one {} component, found {:?}",
            want.label(),
            ex.interior.iter().map(|t| t.label()).collect::<Vec<_>>()
        )));
    }
    Ok(Witness { dim: n, n_dirs, element: t, lambda, window, spacing, measured_error, margin, interior: ex.interior })
}

/// Largest relative deviation |count/M − area fraction| / area fraction of
/// a point set on S^{n−1} over `caps` random caps {⟨x, c⟩ ≥ t}, t ∈ [−½, ½].
pub fn cap_discrepancy(points: &[Vec<f64>], caps: usize, seed: u64) -> f64 {
    let Some(n) = points.first().map(|p| p.len()) else {
        return f64::NAN;
    };
    let mut r = rng::stream(seed, 0xCA9);
    let mut worst: f64 = 0.0;
    for _ in 0..caps {
        let c = random_direction(&mut r, n);
        let t: f64 = r.random_range(-0.5..=0.5);
        let frac = if n == 2 { t.acos() / std::f64::consts::PI } else { 0.5 * (1.0 - t) };
        let count = points.iter().filter(|p| p.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() >= t).count();
        worst = worst.max((count as f64 / points.len() as f64 - frac).abs() / frac);
    }
    worst
}
