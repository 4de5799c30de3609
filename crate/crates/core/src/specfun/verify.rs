//! Numerical identity suites for the special-function layer.
//!
//! Each check compares two independent routes (closed form vs. direct
//! quadrature, recurrence vs. direct evaluation, ...) and reports the largest
//! residual against a fixed tolerance.

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{
    bessel_j, ft_constant, ft_sph_harm, harmonics_upto, minus_i_pow, p1_basis, spherical_transform, BesselOrder,
    HarmonicIndex, SpecfunError,
};
use crate::field::{helmholtz_residual, FnField};
use crate::quadrature::{circle_rule, sphere_rule, unit_sphere_rule};
use crate::rng;

pub const FT_TOLERANCE: f64 = 1e-6;
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-8;
pub const POINT_PAIR_TOLERANCE: f64 = 1e-6;
pub const RECURRENCE_TOLERANCE: f64 = 1e-9;
pub const HELMHOLTZ_TOLERANCE: f64 = 1e-5;
pub const HALF_INTEGER_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.to_string(),
            max_residual,
            tolerance,
            samples,
            passed: max_residual.is_finite() && max_residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpecfunCheckConfig {
    /// Largest degree ℓ exercised by the harmonic-based checks.
    pub ell_max: u32,
    /// Number of radii in (0, max_radius] for the Fourier identity.
    pub radii: usize,
    pub max_radius: f64,
    pub seed: u64,
    /// Multiplies the closed-form transform; anything but 1 is a fault injection.
    pub ft_scale: f64,
}

impl Default for SpecfunCheckConfig {
    fn default() -> Self {
        Self { ell_max: 6, radii: 20, max_radius: 20.0, seed: 1, ft_scale: 1.0 }
    }
}

fn random_unit(rng: &mut rng::Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Direct quadrature of `∫ Y(ξ) e^{−i⟨x,ξ⟩} dσ(ξ)` given harmonic values at the nodes.
fn ft_by_quadrature(x: &[f64], nodes: &[(Vec<f64>, f64)], values: &[f64]) -> Complex64 {
    nodes
        .iter()
        .zip(values)
        .map(|((xi, w), y)| {
            let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
            Complex64::from_polar(w * y, -phase)
        })
        .sum()
}

/// Closed-form transform vs. direct surface quadrature, n ∈ {2, 3}, every
/// (ℓ, m) with ℓ ≤ ell_max, at `radii` radii in (0, max_radius].
pub fn fourier_identity(cfg: &SpecfunCheckConfig) -> Result<IdentityCheck, SpecfunError> {
    let mut rng = rng::stream(cfg.seed, 11);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for n in [2usize, 3] {
        let ds = (n - 1) as u8;
        let band = cfg.max_radius + cfg.ell_max as f64;
        let nodes = if n == 2 { circle_rule(4 * band.ceil() as usize + 64) } else { sphere_rule(band.ceil() as usize + 50) };
        let table: Vec<Vec<f64>> =
            nodes.iter().map(|(xi, _)| harmonics_upto(ds, cfg.ell_max, xi)).collect::<Result<_, _>>()?;
        let indices = HarmonicIndex::all_upto(ds, cfg.ell_max);
        for k in 1..=cfg.radii {
            let r = cfg.max_radius * k as f64 / cfg.radii as f64;
            let dir = random_unit(&mut rng, n);
            let x: Vec<f64> = dir.iter().map(|d| r * d).collect();
            for idx in &indices {
                let column: Vec<f64> = table.iter().map(|row| row[idx.flat()]).collect();
                let quad = ft_by_quadrature(&x, &nodes, &column);
                let closed = ft_sph_harm(*idx, &x)? * cfg.ft_scale;
                worst = worst.max((quad - closed).norm());
                samples += 1;
            }
        }
    }
    Ok(IdentityCheck::new("ft_sph_harm", worst, FT_TOLERANCE, samples))
}

/// Gram matrix of the real harmonics under an exact product rule.
pub fn orthonormality(dim_sphere: u8, ell_max: u32) -> Result<IdentityCheck, SpecfunError> {
    let nodes =
        if dim_sphere == 1 { circle_rule(2 * ell_max as usize + 8) } else { sphere_rule(ell_max as usize + 4) };
    let count = super::harmonic_count_upto(dim_sphere, ell_max);
    let mut gram = vec![0.0; count * count];
    for (xi, w) in &nodes {
        let y = harmonics_upto(dim_sphere, ell_max, xi)?;
        for i in 0..count {
            for j in 0..count {
                gram[i * count + j] += w * y[i] * y[j];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..count {
        for j in 0..count {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[i * count + j] - target).abs());
        }
    }
    let name = if dim_sphere == 1 { "orthonormality_s1" } else { "orthonormality_s2" };
    Ok(IdentityCheck::new(name, worst, ORTHONORMALITY_TOLERANCE, count * count))
}

/// Three-term recurrence residual `|J_{ν−1} + J_{ν+1} − (2ν/x) J_ν|`, scaled by the
/// largest term, for integer and half-integer ν in [1, 20] and x in [0.1, 50].
pub fn bessel_recurrence() -> Result<IdentityCheck, SpecfunError> {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for twice in 2..=40u32 {
        let nu = BesselOrder::half(twice);
        for k in 0..=100 {
            let x = 0.1 + 49.9 * k as f64 / 100.0;
            let lo = bessel_j(BesselOrder::half(twice - 2), x)?;
            let mid = bessel_j(nu, x)?;
            let hi = bessel_j(BesselOrder::half(twice + 2), x)?;
            let middle = 2.0 * nu.value() / x * mid;
            let scale = lo.abs().max(hi.abs()).max(middle.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((lo + hi - middle).abs() / scale);
            samples += 1;
        }
    }
    Ok(IdentityCheck::new("bessel_recurrence", worst, RECURRENCE_TOLERANCE, samples))
}

/// Half-integer orders against their elementary closed forms.
pub fn half_integer_forms() -> Result<IdentityCheck, SpecfunError> {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for k in 1..=200 {
        let x = 0.25 * k as f64;
        let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let j_half = pref * x.sin();
        let j_three_halves = pref * (x.sin() / x - x.cos());
        let a = bessel_j(BesselOrder::half(1), x)?;
        let b = bessel_j(BesselOrder::half(3), x)?;
        worst = worst.max((a - j_half).abs()).max((b - j_three_halves).abs());
        samples += 2;
    }
    Ok(IdentityCheck::new("bessel_half_integer", worst, HALF_INTEGER_TOLERANCE, samples))
}

/// `∫ h(⟨ẋ,ẏ⟩) Y(ẏ) dσ(ẏ) = λ_h(ℓ) Y(ẋ)` with h(t) = e^{−irt}, and λ_h(ℓ)
/// against its Bessel closed form.
pub fn point_pair(cfg: &SpecfunCheckConfig) -> Result<IdentityCheck, SpecfunError> {
    let mut rng = rng::stream(cfg.seed, 12);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    let radii = [0.5, 3.0, 7.5, 12.0, 20.0];
    for n in [2usize, 3] {
        let ds = (n - 1) as u8;
        let nodes = unit_sphere_rule(n, 20.0 + cfg.ell_max as f64 + 30.0);
        let table: Vec<Vec<f64>> =
            nodes.iter().map(|(xi, _)| harmonics_upto(ds, cfg.ell_max, xi)).collect::<Result<_, _>>()?;
        let points: Vec<Vec<f64>> = (0..10).map(|_| random_unit(&mut rng, n)).collect();
        for &r in &radii {
            let h = |t: f64| Complex64::from_polar(1.0, -r * t);
            for ell in 0..=cfg.ell_max {
                let lambda = spherical_transform(h, ell, n, 160)?;
                let nu = BesselOrder::for_dimension(n);
                let closed = minus_i_pow(ell) * (ft_constant(n) * bessel_j(nu.shifted(ell), r)? / r.powf(nu.value()));
                worst = worst.max((lambda - closed).norm());
                for x in &points {
                    let yx = harmonics_upto(ds, cfg.ell_max, x)?;
                    for idx in HarmonicIndex::all_upto(ds, cfg.ell_max).iter().filter(|i| i.ell == ell) {
                        let lhs: Complex64 = nodes
                            .iter()
                            .zip(&table)
                            .map(|((yv, w), row)| {
                                let t: f64 = x.iter().zip(yv).map(|(a, b)| a * b).sum();
                                h(t) * (w * row[idx.flat()])
                            })
                            .sum();
                        worst = worst.max((lhs - lambda * yx[idx.flat()]).norm());
                        samples += 1;
                    }
                }
            }
        }
    }
    Ok(IdentityCheck::new("point_pair_transform", worst, POINT_PAIR_TOLERANCE, samples))
}

/// Real P₁ combinations satisfy `(Δ + 1) f = 0` under finite differences (h = 1e−3).
pub fn helmholtz(cfg: &SpecfunCheckConfig) -> Result<IdentityCheck, SpecfunError> {
    let mut rng = rng::stream(cfg.seed, 13);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for n in [2usize, 3] {
        let ds = (n - 1) as u8;
        let indices = HarmonicIndex::all_upto(ds, cfg.ell_max.min(4));
        for _ in 0..3 {
            let coeffs: Vec<f64> = indices.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = FnField::new(n, |x: &[f64]| {
                indices.iter().zip(&coeffs).map(|(idx, c)| c * p1_basis(*idx, x).unwrap_or(f64::NAN)).sum()
            });
            for _ in 0..10 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
                let res = helmholtz_residual(&f, &x, 1e-3);
                worst = worst.max(res.relative());
                samples += 1;
            }
        }
    }
    Ok(IdentityCheck::new("helmholtz_p1", worst, HELMHOLTZ_TOLERANCE, samples))
}

/// Every suite, in a fixed order.
pub fn run_all(cfg: &SpecfunCheckConfig) -> Result<Vec<IdentityCheck>, SpecfunError> {
    Ok(vec![
        bessel_recurrence()?,
        half_integer_forms()?,
        orthonormality(1, cfg.ell_max)?,
        orthonormality(2, cfg.ell_max)?,
        fourier_identity(cfg)?,
        point_pair(cfg)?,
        helmholtz(cfg)?,
    ])
}
