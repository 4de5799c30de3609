//! Gaussian ensembles of monochromatic and band-limited waves.
//!
//! Normalization: every ensemble has unit variance, `E f(x)² = 1`. The series
//! expansion in spherical harmonics carries the constant `(2π)^{n/2}` in its
//! natural form; dividing by √vol(S^{n−1}) gives unit variance, so the P₁ kind
//! uses the prefactor `(2π)^{n/2} / √vol(S^{n−1})` (√(2π) for n = 2, π√2 for n = 3).

mod covariance;
mod directions;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::rng;
use crate::specfun::{
    bessel_j_scaled_sequence, ft_constant, harmonic_count_upto, harmonics_upto_unchecked, sphere_volume,
    SpecfunError,
};

pub use covariance::{
    covariance_empirical, covariance_empirical_at, covariance_exact, CovarianceEstimate, COVARIANCE_LABEL,
};
pub use directions::{equidistributed_directions, random_direction, random_shell_radius, with_antipodes};

pub const WAVE_SAMPLE_SCHEMA: &str = "monowave.wave_sample/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid field spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionScheme {
    Equidistributed,
    IidRandom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldKind {
    /// Spherical-harmonic/Bessel expansion truncated at degree `max_degree`.
    P1Truncated { max_degree: i64 },
    /// `n_dirs` plane-wave pairs ±ξ_j with spectral radii in [alpha, 1].
    PlaneWave { n_dirs: i64, alpha: f64, directions: DirectionScheme },
    /// Random spherical harmonic of degree `ell` on S².
    SphereEnsemble { ell: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub dim: usize,
    pub kind: FieldKind,
    pub seed: u64,
}

impl FieldSpec {
    pub fn plane_wave(dim: usize, n_dirs: usize, alpha: f64, seed: u64) -> Self {
        Self {
            dim,
            kind: FieldKind::PlaneWave { n_dirs: n_dirs as i64, alpha, directions: DirectionScheme::Equidistributed },
            seed,
        }
    }

    pub fn p1_truncated(dim: usize, max_degree: u32, seed: u64) -> Self {
        Self { dim, kind: FieldKind::P1Truncated { max_degree: max_degree as i64 }, seed }
    }

    pub fn sphere(ell: u32, seed: u64) -> Self {
        Self { dim: 3, kind: FieldKind::SphereEnsemble { ell: ell as i64 }, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if !(2..=3).contains(&self.dim) {
            return Err(EnsembleError::InvalidSpec(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        match &self.kind {
            FieldKind::P1Truncated { max_degree } if *max_degree < 0 => {
                Err(EnsembleError::InvalidSpec(format!("max_degree must be >= 0, got {max_degree}")))
            }
            FieldKind::PlaneWave { n_dirs, .. } if *n_dirs < 1 => {
                Err(EnsembleError::InvalidSpec(format!("n_dirs must be >= 1, got {n_dirs}")))
            }
            FieldKind::PlaneWave { alpha, .. } if !(0.0..=1.0).contains(alpha) => {
                Err(EnsembleError::InvalidSpec(format!("alpha must lie in [0, 1], got {alpha}")))
            }
            FieldKind::SphereEnsemble { ell } if *ell < 0 => {
                Err(EnsembleError::InvalidSpec(format!("ell must be >= 0, got {ell}")))
            }
            FieldKind::SphereEnsemble { .. } if self.dim != 3 => {
                Err(EnsembleError::InvalidSpec("the sphere ensemble lives on S^2 (dim = 3)".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn is_flat(&self) -> bool {
        !matches!(self.kind, FieldKind::SphereEnsemble { .. })
    }
}

/// Degree cutoff for a P₁-truncated field on a window of radius `radius`:
/// `ceil(R + 10 R^{1/3}) + 5`. Beyond the Bessel turning point ℓ ≈ R the
/// radial factors decay super-exponentially.
pub fn truncation_degree(radius: f64) -> u32 {
    (radius + 10.0 * radius.cbrt()).ceil() as u32 + 5
}

/// One plane-wave term: the field contains `Re(weight · e^{i⟨x, xi⟩})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveTerm {
    pub xi: Vec<f64>,
    pub weight: Complex64,
}

/// A realization of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSample {
    pub schema: String,
    pub spec: FieldSpec,
    /// P₁: b_{ℓ,m} in harmonic flat order. PlaneWave: a_0, b_0, a_1, b_1, ….
    /// Sphere: c_1 … c_{2ℓ+1}.
    pub coefficients: Vec<f64>,
    /// PlaneWave only: one representative ξ_j per ±ξ pair, scaled to its
    /// spectral radius.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directions: Vec<Vec<f64>>,
}

/// Draws a realization. Same spec (including seed) ⇒ identical sample.
pub fn sample(spec: &FieldSpec) -> Result<WaveSample, EnsembleError> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, rng::PRIMARY_STREAM);
    let n = spec.dim;
    let (coefficients, directions) = match &spec.kind {
        FieldKind::P1Truncated { max_degree } => {
            let count = harmonic_count_upto((n - 1) as u8, *max_degree as u32);
            (gaussians(&mut rng, count), Vec::new())
        }
        FieldKind::SphereEnsemble { ell } => (gaussians(&mut rng, 2 * *ell as usize + 1), Vec::new()),
        FieldKind::PlaneWave { n_dirs, alpha, directions } => {
            let count = *n_dirs as usize;
            let mut dirs = match directions {
                DirectionScheme::Equidistributed => equidistributed_directions(n, count),
                DirectionScheme::IidRandom => (0..count).map(|_| random_direction(&mut rng, n)).collect(),
            };
            if *alpha < 1.0 {
                for d in dirs.iter_mut() {
                    let s = random_shell_radius(&mut rng, n, *alpha);
                    d.iter_mut().for_each(|v| *v *= s);
                }
            }
            (gaussians(&mut rng, 2 * count), dirs)
        }
    };
    Ok(WaveSample { schema: WAVE_SAMPLE_SCHEMA.to_string(), spec: spec.clone(), coefficients, directions })
}

fn gaussians(rng: &mut rng::Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// (2π)^{n/2} / √vol(S^{n−1})
pub fn p1_unit_variance_constant(n: usize) -> f64 {
    ft_constant(n) / sphere_volume(n).sqrt()
}

impl WaveSample {
    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, EnsembleError> {
        if x.len() != self.spec.dim {
            return Err(SpecfunError::Domain(format!(
                "expected a point in R^{}, got {} coordinates",
                self.spec.dim,
                x.len()
            ))
            .into());
        }
        if let FieldKind::SphereEnsemble { .. } = self.spec.kind {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(SpecfunError::Domain(format!("sphere ensemble evaluated off S^2 (|x| = {norm})")).into());
            }
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.spec.kind {
            FieldKind::PlaneWave { n_dirs, .. } => {
                let scale = 1.0 / (*n_dirs as f64).sqrt();
                let mut acc = 0.0;
                for (j, xi) in self.directions.iter().enumerate() {
                    let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
                    let (s, c) = phase.sin_cos();
                    acc += self.coefficients[2 * j] * c + self.coefficients[2 * j + 1] * s;
                }
                scale * acc
            }
            FieldKind::P1Truncated { max_degree } => {
                let n = self.spec.dim;
                let l = *max_degree as u32;
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let base = if n == 2 { 0.0 } else { 0.5 };
                let radial = bessel_j_scaled_sequence(base, l as usize, r).expect("r >= 0");
                let konst = p1_unit_variance_constant(n);
                if r == 0.0 {
                    return konst * self.coefficients[0] * radial[0] / sphere_volume(n).sqrt();
                }
                let ds = (n - 1) as u8;
                let harm = harmonics_upto_unchecked(ds, l, x);
                let mut acc = 0.0;
                let mut k = 0;
                for (ell, g) in radial.iter().enumerate() {
                    let d = crate::specfun::harmonic_dimension(ds, ell as u32) as usize;
                    let mut part = 0.0;
                    for _ in 0..d {
                        part += self.coefficients[k] * harm[k];
                        k += 1;
                    }
                    acc += part * g;
                }
                konst * acc
            }
            FieldKind::SphereEnsemble { ell } => {
                let l = *ell as u32;
                let harm = harmonics_upto_unchecked(2, l, x);
                let start = (l * l) as usize;
                let scale = (4.0 * std::f64::consts::PI / (2 * l + 1) as f64).sqrt();
                scale * self.coefficients.iter().zip(&harm[start..]).map(|(c, y)| c * y).sum::<f64>()
            }
        }
    }

    /// Plane-wave form, when the sample is a finite plane-wave sum.
    pub fn plane_wave_terms(&self) -> Option<Vec<PlaneWaveTerm>> {
        match &self.spec.kind {
            FieldKind::PlaneWave { n_dirs, .. } => {
                let scale = 1.0 / (*n_dirs as f64).sqrt();
                Some(
                    self.directions
                        .iter()
                        .enumerate()
                        .map(|(j, xi)| PlaneWaveTerm {
                            xi: xi.clone(),
                            // a cos θ + b sin θ = Re((a − i b) e^{iθ})
                            weight: Complex64::new(self.coefficients[2 * j], -self.coefficients[2 * j + 1]) * scale,
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wave sample serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, EnsembleError> {
        let s: WaveSample =
            serde_json::from_str(text).map_err(|e| EnsembleError::InvalidSpec(format!("wave sample JSON: {e}")))?;
        s.check_consistency()?;
        Ok(s)
    }

    /// Coefficient and direction counts agree with the field kind.
    pub fn check_consistency(&self) -> Result<(), EnsembleError> {
        self.spec.validate()?;
        if self.schema != WAVE_SAMPLE_SCHEMA {
            return Err(EnsembleError::InvalidSpec(format!("unknown schema {:?}", self.schema)));
        }
        let n = self.spec.dim;
        let (want_coeffs, want_dirs) = match &self.spec.kind {
            FieldKind::P1Truncated { max_degree } => (harmonic_count_upto((n - 1) as u8, *max_degree as u32), 0),
            FieldKind::SphereEnsemble { ell } => (2 * *ell as usize + 1, 0),
            FieldKind::PlaneWave { n_dirs, .. } => (2 * *n_dirs as usize, *n_dirs as usize),
        };
        if self.coefficients.len() != want_coeffs || self.directions.len() != want_dirs {
            return Err(EnsembleError::InvalidSpec(format!(
                "expected {want_coeffs} coefficients and {want_dirs} directions, found {} and {}",
                self.coefficients.len(),
                self.directions.len()
            )));
        }
        if self.directions.iter().any(|d| d.len() != n) {
            return Err(EnsembleError::InvalidSpec("direction of wrong dimension".into()));
        }
        Ok(())
    }
}

impl Field for WaveSample {
    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self.plane_wave_terms() {
            Some(terms) => {
                // ∇ Re(w e^{i⟨x,ξ⟩}) = Re(i w e^{i⟨x,ξ⟩}) ξ
                let mut g = vec![0.0; x.len()];
                for t in terms {
                    let phase: f64 = t.xi.iter().zip(x).map(|(a, b)| a * b).sum();
                    let d = (Complex64::i() * t.weight * Complex64::from_polar(1.0, phase)).re;
                    g.iter_mut().zip(&t.xi).for_each(|(gk, xk)| *gk += d * xk);
                }
                g
            }
            None => {
                let h = 1e-5;
                let mut p = x.to_vec();
                (0..x.len())
                    .map(|k| {
                        p[k] = x[k] + h;
                        let fp = self.value(&p);
                        p[k] = x[k] - h;
                        let fm = self.value(&p);
                        p[k] = x[k];
                        (fp - fm) / (2.0 * h)
                    })
                    .collect()
            }
        }
    }
}
