use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample, EnsembleError, FieldKind, FieldSpec};
use crate::quadrature::adaptive_simpson;
use crate::rng::trial_seed;
use crate::specfun::{bessel_j_scaled, gamma, BesselOrder, SpecfunError};

/// Label mixed into per-trial seeds of covariance runs.
pub const COVARIANCE_LABEL: u64 = 0xC0;

/// Unit-variance covariance `E f(x) f(y)` at distance r = |x − y|.
///
/// α = 1: `2^ν Γ(ν+1) J_ν(r)/r^ν` (J_0 for n = 2, sin r / r for n = 3).
/// α < 1: that kernel averaged over spectral radii s ∈ [α, 1] with weight s^{n−1}.
pub fn covariance_exact(n: usize, r: f64, alpha: f64) -> Result<f64, EnsembleError> {
    if !(2..=3).contains(&n) {
        return Err(SpecfunError::UnsupportedDimension(n).into());
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(EnsembleError::InvalidSpec(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let r = r.abs();
    let nu = BesselOrder::for_dimension(n);
    let norm = 2f64.powf(nu.value()) * gamma(nu.value() + 1.0);
    let kernel = |t: f64| norm * bessel_j_scaled(nu, t).expect("t >= 0");
    if alpha >= 1.0 || r == 0.0 {
        return Ok(kernel(r));
    }
    let nf = n as i32;
    let weight_total = (1.0 - alpha.powi(nf)) / n as f64;
    let integrand = |s: f64| kernel(s * r) * s.powi(nf - 1);
    Ok(adaptive_simpson(&integrand, alpha, 1.0, 1e-13) / weight_total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub r: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of `E f(0) f(r e₁)` (flat kinds) or of the correlation
/// at geodesic angle r from the north pole (sphere kind).
pub fn covariance_empirical(
    spec: &FieldSpec,
    r_values: &[f64],
    trials: usize,
) -> Result<Vec<CovarianceEstimate>, EnsembleError> {
    let base = vec![0.0; spec.dim];
    let mut dir = vec![0.0; spec.dim];
    dir[0] = 1.0;
    covariance_empirical_at(spec, &base, &dir, r_values, trials)
}

/// Same as [`covariance_empirical`] with an explicit base point and unit
/// direction (flat kinds only; the sphere kind ignores both).
pub fn covariance_empirical_at(
    spec: &FieldSpec,
    base: &[f64],
    direction: &[f64],
    r_values: &[f64],
    trials: usize,
) -> Result<Vec<CovarianceEstimate>, EnsembleError> {
    spec.validate()?;
    if trials < 2 {
        return Err(EnsembleError::InvalidSpec("covariance estimate needs at least 2 trials".into()));
    }
    let sphere = matches!(spec.kind, FieldKind::SphereEnsemble { .. });
    let points: Vec<Vec<f64>> = r_values
        .iter()
        .map(|&r| {
            if sphere {
                vec![r.sin(), 0.0, r.cos()]
            } else {
                base.iter().zip(direction).map(|(b, d)| b + r * d).collect()
            }
        })
        .collect();
    let origin: Vec<f64> = if sphere { vec![0.0, 0.0, 1.0] } else { base.to_vec() };

    let products: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = sample(&spec.with_seed(trial_seed(spec.seed, COVARIANCE_LABEL, t)))?;
            let f0 = s.evaluate(&origin)?;
            points.iter().map(|p| Ok(f0 * s.evaluate(p)?)).collect::<Result<Vec<f64>, EnsembleError>>()
        })
        .collect::<Result<_, _>>()?;

    let nt = trials as f64;
    Ok(r_values
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let mean = products.iter().map(|p| p[k]).sum::<f64>() / nt;
            let var = products.iter().map(|p| (p[k] - mean).powi(2)).sum::<f64>() / (nt - 1.0);
            CovarianceEstimate { r, mean, stderr: (var / nt).sqrt() }
        })
        .collect())
}
