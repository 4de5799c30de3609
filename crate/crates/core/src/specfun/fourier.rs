//! Fourier transforms of spherical harmonics (as measures on the unit sphere)
//! and the spherical transform λ_h(ℓ) of a point-pair kernel.
//!
//! Both use the unnormalized surface measure dσ on S^{n−1}. Under that
//! convention `∫ Y^ℓ_m(ξ) e^{−i⟨x,ξ⟩} dσ(ξ) = (2π)^{n/2} (−i)^ℓ Y^ℓ_m(x̂) J_{ℓ+ν}(|x|)/|x|^ν`
//! holds exactly. With the probability measure dσ/vol(S^{n−1}) the right-hand
//! side is divided by vol(S^{n−1}).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{bessel_j, bessel_j_scaled, BesselOrder};
use super::gegenbauer::gegenbauer;
use super::harmonics::{harmonics_upto_unchecked, sphere_volume, HarmonicIndex};
use super::SpecfunError;
use crate::quadrature::gauss_legendre;

/// (−i)^ℓ
pub fn minus_i_pow(ell: u32) -> Complex64 {
    match ell % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// (2π)^{n/2}
pub fn ft_constant(n: usize) -> f64 {
    (2.0 * PI).powf(n as f64 / 2.0)
}

/// The real profile `Y^ℓ_m(x̂) J_{ℓ+ν}(|x|)/|x|^ν` of a P₁ basis element.
pub fn p1_basis(idx: HarmonicIndex, x: &[f64]) -> Result<f64, SpecfunError> {
    let n = idx.ambient_dim();
    if x.len() != n {
        return Err(SpecfunError::UnsupportedDimension(x.len()));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nu = BesselOrder::for_dimension(n);
    if r == 0.0 {
        if idx.ell != 0 {
            return Ok(0.0);
        }
        let y0 = 1.0 / sphere_volume(n).sqrt();
        return Ok(y0 * bessel_j_scaled(nu, 0.0)?);
    }
    let y = harmonics_upto_unchecked(idx.dim_sphere, idx.ell, x)[idx.flat()];
    let radial = bessel_j(nu.shifted(idx.ell), r)? / r.powf(nu.value());
    Ok(y * radial)
}

/// Fourier transform of Y^ℓ_m dσ at x ∈ ℝⁿ, n ∈ {2, 3}.
pub fn ft_sph_harm(idx: HarmonicIndex, x: &[f64]) -> Result<Complex64, SpecfunError> {
    let n = x.len();
    if !(2..=3).contains(&n) {
        return Err(SpecfunError::UnsupportedDimension(n));
    }
    if n != idx.ambient_dim() {
        return Err(SpecfunError::Domain(format!(
            "harmonic on S^{} evaluated at a point of R^{n}",
            idx.dim_sphere
        )));
    }
    Ok(minus_i_pow(idx.ell) * (ft_constant(n) * p1_basis(idx, x)?))
}

/// λ_h(ℓ) = vol(S^{n−2}) / C_ℓ^ν(1) ∫_{−1}^{1} h(t) C_ℓ^ν(t) (1 − t²)^{ν − 1/2} dt,
/// evaluated with t = cos θ and `nodes`-point Gauss–Legendre in θ.
pub fn spherical_transform<H>(h: H, ell: u32, n: usize, nodes: usize) -> Result<Complex64, SpecfunError>
where
    H: Fn(f64) -> Complex64,
{
    if !(2..=3).contains(&n) {
        return Err(SpecfunError::UnsupportedDimension(n));
    }
    let nu = (n as f64 - 2.0) / 2.0;
    let c1 = gegenbauer(ell, nu, 1.0)?;
    let vol_equator = sphere_volume(n - 1);
    let (xs, ws) = gauss_legendre(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        let theta = 0.5 * PI * (x + 1.0);
        let t = theta.cos();
        let s = theta.sin();
        // dt (1 − t²)^{ν − 1/2} = sin^{2ν} θ dθ
        let weight = 0.5 * PI * w * s.powf(2.0 * nu);
        acc += h(t) * (gegenbauer(ell, nu, t)? * weight);
    }
    Ok(acc * (vol_equator / c1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_zero_for_l0_in_3d() {
        let idx = HarmonicIndex::new(2, 0, 1).unwrap();
        let v = ft_sph_harm(idx, &[0.0, 0.0, PI]).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn origin_only_degree_zero() {
        let idx = HarmonicIndex::new(2, 3, 2).unwrap();
        assert_eq!(ft_sph_harm(idx, &[0.0, 0.0, 0.0]).unwrap().norm(), 0.0);
        let idx0 = HarmonicIndex::new(1, 0, 1).unwrap();
        let v = ft_sph_harm(idx0, &[0.0, 0.0]).unwrap();
        // 2π · 1/√(2π) · J_0(0)
        assert!((v.re - (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let idx = HarmonicIndex::new(1, 0, 1).unwrap();
        assert!(matches!(ft_sph_harm(idx, &[1.0, 0.0, 0.0, 0.0]), Err(SpecfunError::UnsupportedDimension(4))));
        assert!(ft_sph_harm(idx, &[1.0, 0.0, 0.0]).is_err());
    }
}
