//! Scalar fields on ℝⁿ and axis-aligned sampling windows.

use serde::{Deserialize, Serialize};

/// A real-valued field on ℝⁿ.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Central-difference gradient.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
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

impl<F: Field + ?Sized> Field for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
}

/// Closure-backed field, used for analytic test fields.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `base + eps · perturbation`
pub struct Perturbed<'a> {
    pub base: &'a dyn Field,
    pub perturbation: &'a dyn Field,
    pub eps: f64,
}

impl Field for Perturbed<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.base.value(x) + self.eps * self.perturbation.value(x)
    }
}

/// Axis-aligned box `[min_k, max_k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Window {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Self {
        Self { min, max }
    }

    /// Box centred at the origin with the given side lengths.
    pub fn centered(sides: &[f64]) -> Self {
        Self {
            min: sides.iter().map(|s| -0.5 * s).collect(),
            max: sides.iter().map(|s| 0.5 * s).collect(),
        }
    }

    /// `[−half, half]ⁿ`
    pub fn cube(dim: usize, half: f64) -> Self {
        Self { min: vec![-half; dim], max: vec![half; dim] }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn sides(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).collect()
    }

    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn is_degenerate(&self) -> bool {
        self.min.len() != self.max.len()
            || self.min.is_empty()
            || self.min.iter().zip(&self.max).any(|(a, b)| !(b > a) || !a.is_finite() || !b.is_finite())
    }
}

/// Standard second-order finite-difference Laplacian (the 5-point stencil in
/// the plane, 7-point in space) with step `h`.
pub fn laplacian_fd(field: &dyn Field, x: &[f64], h: f64) -> f64 {
    let f0 = field.value(x);
    let mut p = x.to_vec();
    let mut acc = 0.0;
    for k in 0..x.len() {
        let mut stencil = |d: f64| {
            p[k] = x[k] + d;
            let v = field.value(&p);
            p[k] = x[k];
            v
        };
        let (p1, m1) = (stencil(h), stencil(-h));
        acc += (p1 - 2.0 * f0 + m1) / (h * h);
    }
    acc
}

/// Result of a finite-difference `(Δ + 1) f` check at one point.
#[derive(Clone, Copy, Debug)]
pub struct HelmholtzResidual {
    pub residual: f64,
    /// max |f| over a few points within distance π of x
    pub local_sup: f64,
}

impl HelmholtzResidual {
    pub fn relative(&self) -> f64 {
        if self.local_sup == 0.0 {
            self.residual
        } else {
            self.residual / self.local_sup
        }
    }
}

pub fn helmholtz_residual(field: &dyn Field, x: &[f64], h: f64) -> HelmholtzResidual {
    let residual = (laplacian_fd(field, x, h) + field.value(x)).abs();
    let mut local_sup = field.value(x).abs();
    let mut p = x.to_vec();
    for k in 0..x.len() {
        for d in [-std::f64::consts::PI, -1.5, -0.75, 0.75, 1.5, std::f64::consts::PI] {
            p[k] = x[k] + d;
            local_sup = local_sup.max(field.value(&p).abs());
            p[k] = x[k];
        }
    }
    HelmholtzResidual { residual, local_sup }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_is_helmholtz() {
        let f = FnField::new(2, |x: &[f64]| (0.6 * x[0] + 0.8 * x[1]).cos());
        let r = helmholtz_residual(&f, &[0.3, -1.2], 1e-3);
        assert!(r.relative() < 1e-6, "{r:?}");
    }

    #[test]
    fn window_geometry() {
        let w = Window::centered(&[2.0, 4.0]);
        assert_eq!(w.volume(), 8.0);
        assert!(!w.is_degenerate());
        assert!(Window::new(vec![0.0, 0.0], vec![1.0, 0.0]).is_degenerate());
    }
}
