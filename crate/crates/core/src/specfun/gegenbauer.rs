//! Gegenbauer polynomials and zonal spherical functions.
//!
//! For ν = 0 (the circle, n = 2) `C_ℓ^ν` degenerates. We use the limit
//! convention `C_ℓ^0 := lim_{ν→0} C_ℓ^ν / ν = (2/ℓ) T_ℓ` for ℓ ≥ 1 and
//! `C_0^0 := 1`, so the zonal ratio `C_ℓ^0(t) / C_ℓ^0(1)` is the Chebyshev
//! polynomial `T_ℓ(t) = cos(ℓθ)`.

use super::SpecfunError;

fn check_t(t: f64) -> Result<(), SpecfunError> {
    if t.is_nan() || t.abs() > 1.0 + 1e-12 {
        Err(SpecfunError::Domain(format!("Gegenbauer argument must satisfy |t| <= 1, got {t}")))
    } else {
        Ok(())
    }
}

fn chebyshev_t(ell: u32, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if ell == 0 {
        return prev;
    }
    for _ in 1..ell {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// C_ℓ^ν(t) by the three-term recurrence
/// `n C_n = 2t(n + ν − 1) C_{n−1} − (n + 2ν − 2) C_{n−2}`.
pub fn gegenbauer(ell: u32, nu: f64, t: f64) -> Result<f64, SpecfunError> {
    check_t(t)?;
    if nu < 0.0 || nu.is_nan() {
        return Err(SpecfunError::Domain(format!("Gegenbauer parameter must be >= 0, got {nu}")));
    }
    if ell == 0 {
        return Ok(1.0);
    }
    if nu == 0.0 {
        return Ok(2.0 / ell as f64 * chebyshev_t(ell, t));
    }
    let (mut prev, mut cur) = (1.0, 2.0 * nu * t);
    for k in 2..=ell {
        let k = k as f64;
        let next = (2.0 * t * (k + nu - 1.0) * cur - (k + 2.0 * nu - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Zonal function of degree ℓ on S^{n−1}: `C_ℓ^ν(t) / C_ℓ^ν(1)` with ν = (n−2)/2.
pub fn zonal(ell: u32, n: usize, t: f64) -> Result<f64, SpecfunError> {
    check_t(t)?;
    if n < 2 {
        return Err(SpecfunError::UnsupportedDimension(n));
    }
    let nu = (n as f64 - 2.0) / 2.0;
    let at_pole = gegenbauer(ell, nu, 1.0)?;
    if at_pole == 0.0 {
        return Err(SpecfunError::DegenerateOrder { ell, nu });
    }
    Ok(gegenbauer(ell, nu, t.clamp(-1.0, 1.0))? / at_pole)
}
