//! P₁/T₁ approximation, ball eigenfunctions, isotopy checks and explicit
//! witnesses.
//!
//! * [`P1Element`]: finite sums `Σ c_{ℓm} Y^ℓ_m(x̂) J_{ℓ+ν}(|x|)/|x|^ν`.
//! * [`T1Element`]: finite sums `Σ_j 2 Re(w_j e^{i⟨x, ξ_j⟩})` over unit ξ_j,
//!   i.e. the pair ±ξ_j with weights w_j and conj(w_j).

mod witness;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{DirectionScheme, FieldKind, FieldSpec, WaveSample, WAVE_SAMPLE_SCHEMA};
use crate::field::Field;
use crate::nodal::NodalError;
use crate::specfun::{
    bessel_j_scaled_sequence, harmonic_count_upto, harmonic_dimension, harmonics_upto_unchecked, ln_gamma,
    ln_series_envelope, sphere_volume, SpecfunError,
};

pub use crate::ensemble::equidistributed_directions;

pub use witness::{
    ball_eigenfunction, ball_samples, cap_discrepancy, isotopy_margin, isotopy_stability, p1_to_t1,
    sup_error_on_samples, t1_witness_for_sphere, IsotopyMargin, IsotopyReport, StabilityEntry, Witness,
};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("truncation bound {bound:.3e} exceeds the requested tolerance {tolerance:.3e}; raise the cutoff")]
    CutoffTooSmall { bound: f64, tolerance: f64 },
    #[error("the base field has no closed interior nodal component in the window")]
    NoComponent,
    #[error("N = {n_dirs} is too small: measured error {error:.3e} is not below the isotopy margin {margin:.3e}")]
    InsufficientN { n_dirs: usize, error: f64, margin: f64 },
    #[error("resolution failure: {0}")]
    Resolution(String),
    #[error("witness verification failed: {0}")]
    Verification(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Nodal(#[from] NodalError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

fn check_dim(n: usize) -> Result<(), ApproxError> {
    if (2..=3).contains(&n) {
        Ok(())
    } else {
        Err(ApproxError::Invalid(format!("dimension must be 2 or 3, got {n}")))
    }
}

fn nu_of(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

/// Finitely supported element of P₁, coefficients in harmonic flat order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P1Element {
    pub dim: usize,
    pub max_degree: u32,
    pub coefficients: Vec<f64>,
}

impl P1Element {
    pub fn new(dim: usize, max_degree: u32, coefficients: Vec<f64>) -> Result<Self, ApproxError> {
        check_dim(dim)?;
        let want = harmonic_count_upto((dim - 1) as u8, max_degree);
        if coefficients.len() != want {
            return Err(ApproxError::Invalid(format!(
                "degree {max_degree} in R^{dim} needs {want} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { dim, max_degree, coefficients })
    }

    /// Coefficients from a closure over (ℓ, m), m = 1..=d_ℓ.
    pub fn from_fn(dim: usize, max_degree: u32, mut c: impl FnMut(u32, u32) -> f64) -> Result<Self, ApproxError> {
        check_dim(dim)?;
        let ds = (dim - 1) as u8;
        let mut coefficients = Vec::with_capacity(harmonic_count_upto(ds, max_degree));
        for ell in 0..=max_degree {
            for m in 1..=harmonic_dimension(ds, ell) {
                coefficients.push(c(ell, m));
            }
        }
        Ok(Self { dim, max_degree, coefficients })
    }

    fn dim_sphere(&self) -> u8 {
        (self.dim - 1) as u8
    }

    /// ‖c_ℓ‖₂ over the d_ℓ coefficients of degree ℓ.
    pub fn degree_norm(&self, ell: u32) -> f64 {
        if ell > self.max_degree {
            return 0.0;
        }
        let start = harmonic_count_upto(self.dim_sphere(), ell) - harmonic_dimension(self.dim_sphere(), ell) as usize;
        let end = harmonic_count_upto(self.dim_sphere(), ell);
        self.coefficients[start..end].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The element with all degrees above `cutoff` removed.
    pub fn truncated(&self, cutoff: u32) -> P1Element {
        let l = cutoff.min(self.max_degree);
        let k = harmonic_count_upto(self.dim_sphere(), l);
        P1Element { dim: self.dim, max_degree: l, coefficients: self.coefficients[..k].to_vec() }
    }

    /// Highest degree with a nonzero coefficient (None for the zero element).
    pub fn support_degree(&self) -> Option<u32> {
        (0..=self.max_degree).rev().find(|&l| self.degree_norm(l) > 0.0)
    }
}

impl Field for P1Element {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let radial = bessel_j_scaled_sequence(nu_of(self.dim), self.max_degree as usize, r).expect("r >= 0");
        if r == 0.0 {
            return self.coefficients[0] * radial[0] / sphere_volume(self.dim).sqrt();
        }
        let ds = self.dim_sphere();
        let harm = harmonics_upto_unchecked(ds, self.max_degree, x);
        let mut acc = 0.0;
        let mut k = 0;
        for (ell, g) in radial.iter().enumerate() {
            let mut part = 0.0;
            for _ in 0..harmonic_dimension(ds, ell as u32) {
                part += self.coefficients[k] * harm[k];
                k += 1;
            }
            acc += part * g;
        }
        acc
    }
}

/// Finite plane-wave sum with unit frequencies. `directions[j]` stands for
/// the pair ±ξ_j; the weight of −ξ_j is `conj(weights[j])`, which makes the
/// sum real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct T1Element {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<Complex64>,
}

impl T1Element {
    pub fn new(directions: Vec<Vec<f64>>, weights: Vec<Complex64>) -> Result<Self, ApproxError> {
        let dim = directions.first().map(|d| d.len()).unwrap_or(0);
        check_dim(dim)?;
        if directions.len() != weights.len() {
            return Err(ApproxError::Invalid("one weight per direction is required".into()));
        }
        for d in &directions {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if d.len() != dim || (norm - 1.0).abs() > 1e-12 {
                return Err(ApproxError::Invalid(format!("direction {d:?} is not a unit vector in R^{dim}")));
            }
        }
        Ok(Self { dim, directions, weights })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> T1Element {
        T1Element { weights: self.weights.iter().map(|w| w * factor).collect(), ..self.clone() }
    }

    /// Monochromatic plane-wave samples (all spectral radii 1) as T₁ elements.
    pub fn from_wave_sample(s: &WaveSample) -> Result<Self, ApproxError> {
        let terms = s
            .plane_wave_terms()
            .ok_or_else(|| ApproxError::Invalid("only plane-wave samples are T1 elements".into()))?;
        // Re(W e^{iθ}) = 2 Re((W/2) e^{iθ})
        Self::new(terms.iter().map(|t| t.xi.clone()).collect(), terms.iter().map(|t| t.weight * 0.5).collect())
    }

    /// The element as a plane-wave [`WaveSample`] (seed 0; the coefficients
    /// are carried explicitly, so the seed is not used to regenerate them).
    pub fn to_wave_sample(&self) -> WaveSample {
        let n = self.len();
        let root = (n as f64).sqrt();
        let mut coefficients = Vec::with_capacity(2 * n);
        for w in &self.weights {
            // 2 Re(w e^{iθ}) = 2 w.re cos θ − 2 w.im sin θ
            coefficients.push(2.0 * root * w.re);
            coefficients.push(-2.0 * root * w.im);
        }
        WaveSample {
            schema: WAVE_SAMPLE_SCHEMA.to_string(),
            spec: FieldSpec {
                dim: self.dim,
                kind: FieldKind::PlaneWave {
                    n_dirs: n as i64,
                    alpha: 1.0,
                    directions: DirectionScheme::Equidistributed,
                },
                seed: 0,
            },
            coefficients,
            directions: self.directions.clone(),
        }
    }
}

impl Field for T1Element {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (xi, w) in self.directions.iter().zip(&self.weights) {
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            let (s, c) = phase.sin_cos();
            acc += w.re * c - w.im * s;
        }
        2.0 * acc
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (xi, w) in self.directions.iter().zip(&self.weights) {
            let phase: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
            let (s, c) = phase.sin_cos();
            // d/dθ 2 Re(w e^{iθ}) = −2 (w.re sin θ + w.im cos θ)
            let d = -2.0 * (w.re * s + w.im * c);
            g.iter_mut().zip(xi).for_each(|(gk, xk)| *gk += d * xk);
        }
        g
    }
}

/// Bounds on [0, K] for the radial profile R(r) = J_{ℓ+ν}(r)/r^ν of degree ℓ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialEnvelope {
    /// sup |R|
    pub value: f64,
    /// sup |R'|
    pub derivative: f64,
    /// sup |R/r| (0 for ℓ = 0, where it multiplies a vanishing tangential term)
    pub over_r: f64,
}

/// Envelopes from the absolute power series (all powers of r are
/// nonnegative, so the sup sits at r = K), capped by the global bounds
/// |J_ℓ|, |J_ℓ'| ≤ 1 and 2ℓ J_ℓ/r = J_{ℓ−1} + J_{ℓ+1} (n = 2), and
/// |j_ℓ|, |j_ℓ'| ≤ 1 for the spherical Bessel functions (n = 3).
pub fn radial_envelope(n: usize, ell: u32, radius: f64) -> RadialEnvelope {
    let nu = nu_of(n);
    let mu = ell as f64 + nu;
    let k = radius.max(0.0);
    let (cap, cap_over_r) = if n == 2 {
        (1.0, if ell == 0 { f64::INFINITY } else { 1.0 / ell as f64 })
    } else {
        let c = (2.0 / std::f64::consts::PI).sqrt();
        (c, 2.0 * c / (2 * ell + 1) as f64)
    };
    if k == 0.0 {
        // R(0) = 1/(2^ν Γ(ν+1)) for ℓ = 0
        let value = if ell == 0 { (-ln_gamma(mu + 1.0) - mu * 2f64.ln()).exp() } else { 0.0 };
        return RadialEnvelope { value: value.min(cap), derivative: 0.0, over_r: 0.0 };
    }
    // terms t_k = (K²/4)^k / (k! (μ+1)_k), in log space
    let q = 0.25 * k * k;
    let mut ln_t = 0.0f64;
    let mut peak = 0.0f64;
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for i in 0..100_000u32 {
        terms.push((ln_t, (2 * i + ell) as f64));
        peak = peak.max(ln_t);
        ln_t += q.ln() - ((i + 1) as f64).ln() - (mu + (i + 1) as f64).ln();
        if (i as f64) * (i as f64) > q && ln_t < peak - 60.0 {
            break;
        }
    }
    let m = peak;
    let s0: f64 = terms.iter().map(|t| (t.0 - m).exp()).sum();
    let s1: f64 = terms.iter().map(|t| t.1 * (t.0 - m).exp()).sum();
    // (K/2)^μ/Γ(μ+1) · K^{−ν}
    let ln_pref = ln_series_envelope(mu, k) - nu * k.ln() + m;
    let value = (ln_pref + s0.ln()).exp();
    let derivative = if s1 > 0.0 { (ln_pref - k.ln() + s1.ln()).exp() } else { 0.0 };
    let over_r = if ell == 0 { 0.0 } else { (ln_pref - k.ln() + s0.ln()).exp().min(cap_over_r) };
    RadialEnvelope { value: value.min(cap), derivative: derivative.min(cap), over_r }
}

/// Certified tail bounds of a truncation on |x| ≤ K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub element: P1Element,
    /// sup |f − f_L|
    pub c0_bound: f64,
    /// sup |∇(f − f_L)|
    pub gradient_bound: f64,
    /// C^t norm bound for the requested order: c0 for t = 0, max(c0, gradient) for t = 1.
    pub bound: f64,
}

/// Truncates `full` at degree `cutoff` and bounds the tail on |x| ≤ `radius`.
///
/// Degree-ℓ terms are bounded through the addition theorem,
/// |Σ_m c_m Y_m| ≤ ‖c_ℓ‖ √(d_ℓ/vol) and |Σ_m c_m ∇_S Y_m| ≤ ‖c_ℓ‖ √(d_ℓ ℓ(ℓ+n−2)/vol),
/// times the radial envelopes. Fails with `CutoffTooSmall` if the bound
/// exceeds `tolerance` (pass infinity to only compute it).
pub fn truncate_p1(
    full: &P1Element,
    cutoff: u32,
    radius: f64,
    order: u8,
    tolerance: f64,
) -> Result<Truncation, ApproxError> {
    if order > 1 {
        return Err(ApproxError::Invalid(format!("only C^0 and C^1 bounds are implemented, got t = {order}")));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(ApproxError::Invalid(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let n = full.dim;
    let ds = full.dim_sphere();
    let vol = sphere_volume(n);
    let mut c0 = 0.0;
    let mut c1 = 0.0;
    for ell in cutoff.saturating_add(1)..=full.max_degree {
        let norm = full.degree_norm(ell);
        if norm == 0.0 {
            continue;
        }
        let d = harmonic_dimension(ds, ell) as f64;
        let env = radial_envelope(n, ell, radius);
        let y = (d / vol).sqrt();
        let dy = (d * (ell as f64) * (ell as f64 + n as f64 - 2.0) / vol).sqrt();
        c0 += norm * y * env.value;
        c1 += norm * (y * env.derivative + dy * env.over_r);
    }
    let bound = if order == 0 { c0 } else { c0.max(c1) };
    if bound > tolerance {
        return Err(ApproxError::CutoffTooSmall { bound, tolerance });
    }
    Ok(Truncation { element: full.truncated(cutoff), c0_bound: c0, gradient_bound: c1, bound })
}
