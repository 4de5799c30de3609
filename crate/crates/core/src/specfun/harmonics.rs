//! Real orthonormal spherical harmonics on S¹ and S².
//!
//! Basis ordering (the `m` index runs over `1..=d_ℓ`):
//!
//! * S¹: `ℓ = 0` has the single function `1/√(2π)`. For `ℓ ≥ 1`, `m = 1` is
//!   `cos(ℓθ)/√π` and `m = 2` is `sin(ℓθ)/√π`, with θ = atan2(x₂, x₁).
//! * S²: `m = 1..=2ℓ+1` maps to the signed order `μ = m − ℓ − 1 ∈ [−ℓ, ℓ]`.
//!   With θ the polar angle from +x₃ and φ = atan2(x₂, x₁),
//!   `Y_{ℓ,μ} = √2 N P_ℓ^μ(cos θ) cos(μφ)` for μ > 0, `N P_ℓ^0(cos θ)` for
//!   μ = 0 and `√2 N P_ℓ^{|μ|}(cos θ) sin(|μ|φ)` for μ < 0, where
//!   `N² = (2ℓ+1)/(4π) · (ℓ−|μ|)!/(ℓ+|μ|)!`. No Condon–Shortley phase: every
//!   `P_ℓ^μ` is nonnegative near the north pole.
//!
//! Both families are orthonormal for the unnormalized surface measure.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpecfunError;

/// (sphere dimension, degree, basis index) with `m` in `1..=d_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub dim_sphere: u8,
    pub ell: u32,
    pub m: u32,
}

impl HarmonicIndex {
    pub fn new(dim_sphere: u8, ell: u32, m: u32) -> Result<Self, SpecfunError> {
        if !(1..=2).contains(&dim_sphere) {
            return Err(SpecfunError::UnsupportedDimension(dim_sphere as usize + 1));
        }
        let d = harmonic_dimension(dim_sphere, ell);
        if m == 0 || m > d {
            return Err(SpecfunError::Domain(format!(
                "harmonic index m = {m} outside 1..={d} for degree {ell} on S^{dim_sphere}"
            )));
        }
        Ok(Self { dim_sphere, ell, m })
    }

    /// Ambient dimension n (the sphere is S^{n−1} ⊂ ℝⁿ).
    pub fn ambient_dim(&self) -> usize {
        self.dim_sphere as usize + 1
    }

    /// Position in the flat ordering used by [`harmonics_upto`].
    pub fn flat(&self) -> usize {
        flat_index(self.dim_sphere, self.ell, self.m)
    }

    /// Every index with degree ≤ `max_ell`, in flat order.
    pub fn all_upto(dim_sphere: u8, max_ell: u32) -> Vec<HarmonicIndex> {
        (0..=max_ell)
            .flat_map(|ell| {
                (1..=harmonic_dimension(dim_sphere, ell)).map(move |m| HarmonicIndex { dim_sphere, ell, m })
            })
            .collect()
    }
}

/// d_ℓ = dim E_ℓ(S^k) for k ∈ {1, 2}.
pub fn harmonic_dimension(dim_sphere: u8, ell: u32) -> u32 {
    match dim_sphere {
        1 => {
            if ell == 0 {
                1
            } else {
                2
            }
        }
        _ => 2 * ell + 1,
    }
}

/// Number of basis functions of degree ≤ `max_ell`.
pub fn harmonic_count_upto(dim_sphere: u8, max_ell: u32) -> usize {
    match dim_sphere {
        1 => 2 * max_ell as usize + 1,
        _ => (max_ell as usize + 1).pow(2),
    }
}

fn flat_index(dim_sphere: u8, ell: u32, m: u32) -> usize {
    match dim_sphere {
        1 => {
            if ell == 0 {
                0
            } else {
                (2 * ell - 1 + (m - 1)) as usize
            }
        }
        _ => (ell * ell + m - 1) as usize,
    }
}

/// vol(S^{n−1}) for the unnormalized surface measure.
pub fn sphere_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // vol(S^{n−1}) = 2π^{n/2} / Γ(n/2)
            2.0 * PI.powf(n as f64 / 2.0) / super::gamma::gamma(n as f64 / 2.0)
        }
    }
}

fn check_unit(point: &[f64], dim_sphere: u8) -> Result<(), SpecfunError> {
    if point.len() != dim_sphere as usize + 1 {
        return Err(SpecfunError::Domain(format!(
            "expected a point in R^{}, got {} coordinates",
            dim_sphere + 1,
            point.len()
        )));
    }
    let norm2: f64 = point.iter().map(|v| v * v).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(SpecfunError::Domain(format!("point is not on the unit sphere (|x| = {})", norm2.sqrt())));
    }
    Ok(())
}

/// Y^ℓ_m(point) for a unit vector `point`.
pub fn real_sph_harm(idx: HarmonicIndex, point: &[f64]) -> Result<f64, SpecfunError> {
    check_unit(point, idx.dim_sphere)?;
    Ok(harmonics_upto_unchecked(idx.dim_sphere, idx.ell, point)[idx.flat()])
}

/// All Y^ℓ_m with ℓ ≤ `max_ell` at a unit vector, in flat order.
pub fn harmonics_upto(dim_sphere: u8, max_ell: u32, point: &[f64]) -> Result<Vec<f64>, SpecfunError> {
    check_unit(point, dim_sphere)?;
    Ok(harmonics_upto_unchecked(dim_sphere, max_ell, point))
}

/// Same as [`harmonics_upto`] without the unit-norm check; the direction is
/// taken from `point` (its norm must be nonzero).
pub(crate) fn harmonics_upto_unchecked(dim_sphere: u8, max_ell: u32, point: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; harmonic_count_upto(dim_sphere, max_ell)];
    match dim_sphere {
        1 => circle_harmonics(max_ell, point, &mut out),
        _ => sphere_harmonics(max_ell, point, &mut out),
    }
    out
}

fn circle_harmonics(max_ell: u32, p: &[f64], out: &mut [f64]) {
    let r = p[0].hypot(p[1]);
    let (c1, s1) = (p[0] / r, p[1] / r);
    out[0] = 1.0 / (2.0 * PI).sqrt();
    let amp = 1.0 / PI.sqrt();
    let (mut c, mut s) = (1.0, 0.0);
    for ell in 1..=max_ell as usize {
        let nc = c * c1 - s * s1;
        let ns = s * c1 + c * s1;
        c = nc;
        s = ns;
        out[2 * ell - 1] = amp * c;
        out[2 * ell] = amp * s;
    }
}

fn sphere_harmonics(max_ell: u32, p: &[f64], out: &mut [f64]) {
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let (x, y, z) = (p[0] / norm, p[1] / norm, p[2] / norm);
    let lmax = max_ell as usize;

    // Reduced normalized Legendre values q[ℓ][μ] = N P_ℓ^μ(z) / s^μ, s = sin θ.
    // The s^μ factor is restored through Re/Im (x + i y)^μ below.
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut q = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
    q[0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        q[idx(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * q[idx(m - 1, m - 1)];
    }
    for m in 0..lmax {
        q[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * z * q[idx(m, m)];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            q[idx(l, m)] = a * (z * q[idx(l - 1, m)] - b * q[idx(l - 2, m)]);
        }
    }

    // (x + i y)^μ = s^μ e^{iμφ}
    let mut re = vec![1.0; lmax + 1];
    let mut im = vec![0.0; lmax + 1];
    for m in 1..=lmax {
        re[m] = re[m - 1] * x - im[m - 1] * y;
        im[m] = im[m - 1] * x + re[m - 1] * y;
    }

    let sqrt2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        let base = l * l;
        out[base + l] = q[idx(l, 0)];
        for m in 1..=l {
            let v = sqrt2 * q[idx(l, m)];
            out[base + l + m] = v * re[m];
            out[base + l - m] = v * im[m];
        }
    }
}
