use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{discrepancy, empirical_measure, EmpiricalTopologyMeasure, MeasureEntry, StatsError};
use crate::ensemble::{sample, FieldKind, FieldSpec, WaveSample};
use crate::field::Window;
use crate::nodal::sphere::{extract_components_sphere, rasterize_sphere_sample};
use crate::nodal::{classify, extract_components, rasterize_sample, NodalError, TopologyType};
use crate::rng::{self, trial_seed};

/// Seed label for concentration runs (window index is added).
pub const CONCENTRATION_LABEL: u64 = 0xC0_4C;

/// Topology of one sample in one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialTopology {
    /// Types of the interior components, Unclassified included, in extraction order.
    pub types: Vec<TopologyType>,
    pub boundary: usize,
}

impl TrialTopology {
    pub fn measure(&self) -> EmpiricalTopologyMeasure {
        empirical_measure(&self.types)
    }
}

/// Rasterize, extract, classify. Sphere samples ignore `window` and use
/// `spacing` as the icosphere edge length.
pub fn trial_topology(s: &WaveSample, window: &Window, spacing: f64) -> Result<TrialTopology, NodalError> {
    let comps = if let FieldKind::SphereEnsemble { .. } = s.spec.kind {
        extract_components_sphere(&rasterize_sphere_sample(s, spacing)?)
    } else {
        extract_components(&rasterize_sample(s, window, spacing)?)?
    };
    let mut types = Vec::new();
    let mut boundary = 0;
    for c in &comps {
        match classify(c) {
            Ok(t) => types.push(t),
            Err(NodalError::Boundary) => boundary += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(TrialTopology { types, boundary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub side: f64,
    pub volume: f64,
    pub trials: usize,
    /// Trials with at least one classified interior component (others have
    /// no μ_f and are excluded from the quantiles).
    pub trials_used: usize,
    /// None when no trial was used.
    pub median: Option<f64>,
    pub p90: Option<f64>,
    pub mean_interior: f64,
    pub mean_boundary: f64,
    pub unclassified: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    /// Pooled measure at the largest window (the reference μ̄).
    pub reference: Vec<MeasureEntry>,
    /// Per-window discrepancies D(μ_f, μ̄) of the used trials.
    pub discrepancies: Vec<Vec<f64>>,
}

/// Linear-interpolation quantile of unsorted data (NaN for empty input).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Fraction of bootstrap resamples in which median(large) ≤ median(small).
pub fn bootstrap_median_order(small: &[f64], large: &[f64], resamples: usize, seed: u64) -> f64 {
    if small.is_empty() || large.is_empty() || resamples == 0 {
        return f64::NAN;
    }
    let mut rng = rng::stream(seed, 0xB007);
    let mut draw = |xs: &[f64]| -> Vec<f64> { (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect() };
    let mut hits = 0usize;
    for _ in 0..resamples {
        let a = draw(small);
        let b = draw(large);
        if quantile(&b, 0.5) <= quantile(&a, 0.5) {
            hits += 1;
        }
    }
    hits as f64 / resamples as f64
}

/// For each window side: `trials` independent samples, μ_f per sample, and
/// quantiles of D(μ_f, μ̄), where μ̄ pools all trials at the largest window.
pub fn concentration_experiment(
    spec: &FieldSpec,
    sides: &[f64],
    trials: usize,
    spacing: f64,
) -> Result<ConcentrationReport, StatsError> {
    if trials < 20 {
        return Err(StatsError::InsufficientData(format!("need at least 20 trials per window, got {trials}")));
    }
    if sides.is_empty() {
        return Err(StatsError::InsufficientData("no window sizes".into()));
    }
    let mut per_window: Vec<Vec<TrialTopology>> = Vec::with_capacity(sides.len());
    for (w, &side) in sides.iter().enumerate() {
        let window = Window::centered(&vec![side; spec.dim]);
        let res: Vec<TrialTopology> = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let s = sample(&spec.with_seed(trial_seed(spec.seed, CONCENTRATION_LABEL + w as u64, t)))
                    .map_err(NodalError::from)?;
                Ok(trial_topology(&s, &window, spacing)?)
            })
            .collect::<Result<_, StatsError>>()?;
        per_window.push(res);
    }
    concentration_from_trials(sides, spec.dim, &per_window)
}

/// Aggregation step of [`concentration_experiment`] on precomputed trials
/// (`per_window[w]` belongs to `sides[w]`).
pub fn concentration_from_trials(
    sides: &[f64],
    dim: usize,
    per_window: &[Vec<TrialTopology>],
) -> Result<ConcentrationReport, StatsError> {
    if sides.is_empty() || sides.len() != per_window.len() {
        return Err(StatsError::InsufficientData("one trial list per window size is required".into()));
    }
    let largest = sides
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let mut reference = EmpiricalTopologyMeasure::default();
    for t in &per_window[largest] {
        reference.merge(&t.measure());
    }
    if reference.is_empty() {
        return Err(StatsError::InsufficientData("no classified interior components at the largest window".into()));
    }

    let mut rows = Vec::new();
    let mut discrepancies = Vec::new();
    for (w, &side) in sides.iter().enumerate() {
        let res = &per_window[w];
        let mut ds = Vec::new();
        let mut unclassified = 0;
        for t in res {
            let m = t.measure();
            unclassified += m.unclassified;
            if !m.is_empty() {
                ds.push(discrepancy(&m, &reference)?);
            }
        }
        let nt = res.len() as f64;
        rows.push(ConcentrationRow {
            side,
            volume: side.powi(dim as i32),
            trials: res.len(),
            trials_used: ds.len(),
            median: Some(quantile(&ds, 0.5)).filter(|q| !q.is_nan()),
            p90: Some(quantile(&ds, 0.9)).filter(|q| !q.is_nan()),
            mean_interior: res.iter().map(|t| t.types.len() as f64).sum::<f64>() / nt,
            mean_boundary: res.iter().map(|t| t.boundary as f64).sum::<f64>() / nt,
            unclassified,
        });
        discrepancies.push(ds);
    }
    Ok(ConcentrationReport { rows, reference: reference.entries(), discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        assert!((quantile(&(0..11).map(f64::from).collect::<Vec<_>>(), 0.9) - 9.0).abs() < 1e-12);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn bootstrap_order_extremes() {
        let small = vec![0.5; 30];
        let large = vec![0.1; 30];
        assert_eq!(bootstrap_median_order(&small, &large, 200, 1), 1.0);
        assert_eq!(bootstrap_median_order(&large, &small, 200, 1), 0.0);
    }
}
