//! Deterministic fields with known nodal topology.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TopologyType;
use crate::field::{Field, Window};
use crate::specfun::{bessel_j, BesselOrder};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TestField {
    /// J₀(|x|) on [−6, 6]²: circles at the first two zeros 2.4048 and 5.5201;
    /// the third zero 8.6537 lies beyond the corners.
    BesselRing,
    /// (sin r)/r on [−4.5, 4.5]³: one sphere at r = π, boundary caps from r = 2π.
    SincSphere,
    /// sin x₁ sin x₂ + 0.2 on [0, Mπ]²: one island per negative cell.
    SineLattice { cells: u32 },
    /// (ρ − 2)² + x₃² − 0.8², ρ = |(x₁, x₂)|, on [−3.5, 3.5]² × [−1.5, 1.5].
    Torus,
}

impl TestField {
    pub fn dim(&self) -> usize {
        match self {
            TestField::BesselRing | TestField::SineLattice { .. } => 2,
            TestField::SincSphere | TestField::Torus => 3,
        }
    }

    pub fn window(&self) -> Window {
        match self {
            TestField::BesselRing => Window::cube(2, 6.0),
            TestField::SincSphere => Window::cube(3, 4.5),
            TestField::SineLattice { cells } => Window::new(vec![0.0, 0.0], vec![*cells as f64 * PI; 2]),
            TestField::Torus => Window::new(vec![-3.5, -3.5, -1.5], vec![3.5, 3.5, 1.5]),
        }
    }

    /// Sorted multiset of types of the interior components.
    pub fn expected_interior(&self) -> Vec<TopologyType> {
        match self {
            TestField::BesselRing => vec![TopologyType::Circle; 2],
            TestField::SincSphere => vec![TopologyType::ClosedSurface { genus: 0 }],
            TestField::SineLattice { cells } => {
                let m = *cells as usize;
                vec![TopologyType::Circle; (m * m) / 2]
            }
            TestField::Torus => vec![TopologyType::ClosedSurface { genus: 1 }],
        }
    }
}

impl Field for TestField {
    fn dim(&self) -> usize {
        TestField::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestField::BesselRing => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                bessel_j(BesselOrder::integer(0), r).expect("r >= 0")
            }
            TestField::SincSphere => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r < 1e-8 {
                    1.0 - r * r / 6.0
                } else {
                    r.sin() / r
                }
            }
            TestField::SineLattice { .. } => x[0].sin() * x[1].sin() + 0.2,
            TestField::Torus => {
                let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (rho - 2.0).powi(2) + x[2] * x[2] - 0.64
            }
        }
    }
}
