use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_topology, StatsError};
use crate::ensemble::{sample, FieldSpec};
use crate::field::Window;
use crate::rng::trial_seed;

/// Seed label for scaling runs (window index is added).
pub const SCALING_LABEL: u64 = 0x5CA1E;

/// One trial: window volume and number of interior components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRun {
    pub volume: f64,
    pub count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Least-squares slope of count = c·V through the origin.
    pub c_hat: f64,
    /// Slope of log(mean count) against log(volume).
    pub exponent: f64,
    /// R² of the log–log fit.
    pub r_squared: f64,
    /// (volume, mean count / volume) per distinct volume, ascending.
    pub densities: Vec<(f64, f64)>,
}

/// Fits count ∝ volume. Needs at least 4 distinct volumes with positive
/// mean counts.
pub fn ns_scaling(runs: &[ScalingRun]) -> Result<ScalingFit, StatsError> {
    let mut vols: Vec<f64> = runs.iter().map(|r| r.volume).collect();
    vols.sort_by(f64::total_cmp);
    vols.dedup();
    if vols.len() < 4 {
        return Err(StatsError::InsufficientData(format!("need at least 4 distinct volumes, got {}", vols.len())));
    }
    if vols[0] <= 0.0 {
        return Err(StatsError::InsufficientData("volumes must be positive".into()));
    }
    let svc: f64 = runs.iter().map(|r| r.volume * r.count).sum();
    let svv: f64 = runs.iter().map(|r| r.volume * r.volume).sum();
    let c_hat = svc / svv;

    let means: Vec<(f64, f64)> = vols
        .iter()
        .map(|&v| {
            let cs: Vec<f64> = runs.iter().filter(|r| r.volume == v).map(|r| r.count).collect();
            (v, cs.iter().sum::<f64>() / cs.len() as f64)
        })
        .collect();
    if means.iter().any(|&(_, m)| m <= 0.0) {
        return Err(StatsError::InsufficientData("a window has zero mean count; log–log fit undefined".into()));
    }
    let xs: Vec<f64> = means.iter().map(|(v, _)| v.ln()).collect();
    let ys: Vec<f64> = means.iter().map(|(_, m)| m.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(ScalingFit { c_hat, exponent, r_squared, densities: means.iter().map(|&(v, m)| (v, m / v)).collect() })
}

/// Interior component counts over centred windows of the given sides,
/// `trials` independent samples per window.
pub fn scaling_experiment(
    spec: &FieldSpec,
    sides: &[f64],
    trials: usize,
    spacing: f64,
) -> Result<Vec<ScalingRun>, StatsError> {
    let mut runs = Vec::with_capacity(sides.len() * trials);
    for (w, &side) in sides.iter().enumerate() {
        let window = Window::centered(&vec![side; spec.dim]);
        let volume = window.volume();
        let counts: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let s = sample(&spec.with_seed(trial_seed(spec.seed, SCALING_LABEL + w as u64, t)))
                    .map_err(crate::nodal::NodalError::from)?;
                let r = trial_topology(&s, &window, spacing)?;
                Ok(r.types.len() as f64)
            })
            .collect::<Result<_, StatsError>>()?;
        runs.extend(counts.into_iter().map(|count| ScalingRun { volume, count }));
    }
    Ok(runs)
}
