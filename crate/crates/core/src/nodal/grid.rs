use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::NodalError;
use crate::ensemble::{FieldKind, WaveSample};
use crate::field::{Field, Window};

/// 16 samples per wavelength 2π.
pub const DEFAULT_SPACING: f64 = 2.0 * PI / 16.0;
/// At least 10 samples per wavelength.
pub const MAX_SPACING: f64 = 2.0 * PI / 10.0;
/// Stored values smaller than this in magnitude are replaced by `+ZERO_JITTER`.
pub const ZERO_JITTER: f64 = 1e-14;

const MAX_POINTS: usize = 200_000_000;

/// Field values on the points `origin + spacing · (i, j[, k])`, x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    /// Builds a grid from raw values, applying the zero jitter.
    pub fn from_values(origin: Vec<f64>, spacing: f64, shape: Vec<usize>, mut values: Vec<f64>) -> Self {
        assert_eq!(origin.len(), shape.len());
        assert_eq!(values.len(), shape.iter().product::<usize>());
        jitter(&mut values);
        Self { dim: shape.len(), origin, spacing, shape, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat index of a multi-index (missing trailing axes are 0).
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let nx = self.shape[0];
        let ny = self.shape[1];
        i + nx * (j + ny * k)
    }

    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.origin).map(|(&i, o)| o + self.spacing * i as f64).collect()
    }

    /// The box actually covered by the grid points.
    pub fn extent(&self) -> Window {
        Window::new(
            self.origin.clone(),
            self.origin.iter().zip(&self.shape).map(|(o, &n)| o + self.spacing * (n - 1) as f64).collect(),
        )
    }
}

fn jitter(values: &mut [f64]) {
    for v in values.iter_mut() {
        if v.abs() < ZERO_JITTER {
            *v = ZERO_JITTER;
        }
    }
}

fn grid_shape(window: &Window, spacing: f64, dim: usize) -> Result<Vec<usize>, NodalError> {
    if window.is_degenerate() {
        return Err(NodalError::Resolution(format!("degenerate window {window:?}")));
    }
    if window.dim() != dim {
        return Err(NodalError::Dimension(format!("window is {}D but the field is {dim}D", window.dim())));
    }
    if !(dim == 2 || dim == 3) {
        return Err(NodalError::Dimension(format!("only 2D and 3D grids are supported, got {dim}D")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(NodalError::Resolution(format!("spacing must be positive, got {spacing}")));
    }
    if spacing > MAX_SPACING * (1.0 + 1e-12) {
        return Err(NodalError::Resolution(format!(
            "spacing {spacing} exceeds 2π/10 = {MAX_SPACING:.6} (fewer than 10 samples per wavelength)"
        )));
    }
    let shape: Vec<usize> = window.sides().iter().map(|s| (s / spacing + 1e-9).floor() as usize + 1).collect();
    if shape.iter().any(|&n| n < 2) {
        return Err(NodalError::Resolution(format!("window {window:?} is thinner than one grid cell")));
    }
    let total = shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
    match total {
        Some(t) if t <= MAX_POINTS => Ok(shape),
        _ => Err(NodalError::Resolution(format!("grid {shape:?} is too large"))),
    }
}

/// Dense evaluation of an arbitrary field, parallel over rows.
pub fn rasterize(field: &dyn Field, window: &Window, spacing: f64) -> Result<ScalarGrid, NodalError> {
    let dim = field.dim();
    let shape = grid_shape(window, spacing, dim)?;
    let origin = window.min.clone();
    let nx = shape[0];
    let total: usize = shape.iter().product();
    let mut values = vec![0.0; total];
    values.par_chunks_mut(nx).enumerate().for_each(|(row, out)| {
        let j = row % shape[1];
        let k = row / shape[1];
        let mut p = origin.clone();
        p[1] = origin[1] + spacing * j as f64;
        if dim == 3 {
            p[2] = origin[2] + spacing * k as f64;
        }
        for (i, v) in out.iter_mut().enumerate() {
            p[0] = origin[0] + spacing * i as f64;
            *v = field.value(&p);
        }
    });
    Ok(ScalarGrid::from_values(origin, spacing, shape, values))
}

/// Rasterizes a flat wave sample. Plane-wave sums use separable per-axis
/// exponential tables, so the cost is one complex product per term and point.
pub fn rasterize_sample(sample: &WaveSample, window: &Window, spacing: f64) -> Result<ScalarGrid, NodalError> {
    if let FieldKind::SphereEnsemble { .. } = sample.spec.kind {
        return Err(NodalError::Dimension("sphere samples are rasterized with sphere::rasterize_sphere".into()));
    }
    let Some(terms) = sample.plane_wave_terms() else {
        return rasterize(sample, window, spacing);
    };
    let dim = sample.dim();
    let shape = grid_shape(window, spacing, dim)?;
    let origin = window.min.clone();
    let (nx, ny) = (shape[0], shape[1]);
    let nz = if dim == 3 { shape[2] } else { 1 };
    let nt = terms.len();

    let table = |axis: usize, count: usize| -> Vec<Complex64> {
        let mut t = Vec::with_capacity(nt * count);
        for term in &terms {
            for i in 0..count {
                let x = origin[axis] + spacing * i as f64;
                t.push(Complex64::from_polar(1.0, term.xi[axis] * x));
            }
        }
        t
    };
    let tx = table(0, nx);
    let (tx_re, tx_im): (Vec<f64>, Vec<f64>) = tx.iter().map(|c| (c.re, c.im)).unzip();
    let ty = table(1, ny);
    let tz = if dim == 3 { table(2, nz) } else { vec![Complex64::new(1.0, 0.0); nt] };

    let mut values = vec![0.0; nx * ny * nz];
    values.par_chunks_mut(nx).enumerate().for_each(|(row, out)| {
        let j = row % ny;
        let k = row / ny;
        for (t, term) in terms.iter().enumerate() {
            let c = term.weight * ty[t * ny + j] * tz[t * nz + k];
            let re = &tx_re[t * nx..(t + 1) * nx];
            let im = &tx_im[t * nx..(t + 1) * nx];
            for ((v, a), b) in out.iter_mut().zip(re).zip(im) {
                *v += c.re * a - c.im * b;
            }
        }
    });
    Ok(ScalarGrid::from_values(origin, spacing, shape, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample, FieldSpec};

    #[test]
    fn fast_path_matches_pointwise() {
        for dim in [2, 3] {
            let s = sample(&FieldSpec::plane_wave(dim, 24, 1.0, 5)).unwrap();
            let w = Window::cube(dim, 3.0);
            let fast = rasterize_sample(&s, &w, 0.35).unwrap();
            let slow = rasterize(&s, &w, 0.35).unwrap();
            assert_eq!(fast.shape, slow.shape);
            let err = fast.values.iter().zip(&slow.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn resolution_errors() {
        let s = sample(&FieldSpec::plane_wave(2, 8, 1.0, 5)).unwrap();
        assert!(matches!(
            rasterize_sample(&s, &Window::cube(2, 3.0), 1.0),
            Err(NodalError::Resolution(_))
        ));
        assert!(matches!(
            rasterize_sample(&s, &Window::new(vec![0.0, 0.0], vec![0.0, 1.0]), 0.1),
            Err(NodalError::Resolution(_))
        ));
        assert!(matches!(
            rasterize_sample(&s, &Window::cube(3, 1.0), 0.1),
            Err(NodalError::Dimension(_))
        ));
    }

    #[test]
    fn exact_zeros_are_jittered() {
        let g = ScalarGrid::from_values(vec![0.0, 0.0], 0.1, vec![2, 2], vec![0.0, -0.0, 1.0, -1.0]);
        assert_eq!(g.values, vec![ZERO_JITTER, ZERO_JITTER, 1.0, -1.0]);
    }
}
