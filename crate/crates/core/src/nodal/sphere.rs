//! Zero sets of fields on S².
//!
//! The sphere is sampled at the vertices of a subdivided icosahedron and the
//! zero set is traced by marching triangles (linear interpolation on every
//! sign-changing edge, one segment per triangle). Triangles have no
//! ambiguous cases, and every crossing vertex has degree 2, so all
//! components are closed curves.

use std::collections::HashMap;

use rayon::prelude::*;

use super::squares::stitch;
use super::{NodalComponent, NodalError, TriMesh, ZERO_JITTER};
use crate::ensemble::{FieldKind, WaveSample};
use crate::field::Field;

/// Field values at the vertices of a unit-sphere triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub mesh: TriMesh,
    pub values: Vec<f64>,
    /// Longest edge (chord length) of the triangulation.
    pub spacing: f64,
}

/// Icosahedron subdivided `level` times, projected onto S².
pub fn icosphere(level: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut vertices: Vec<[f64; 3]> = raw.iter().map(|&v| normalize(v)).collect();
    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vs: &mut Vec<[f64; 3]>| -> u32 {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (vs[a as usize], vs[b as usize]);
                vs.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                (vs.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    TriMesh { vertices, triangles }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn longest_edge(mesh: &TriMesh) -> f64 {
    mesh.triangles
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .map(|(a, b)| {
            let (p, q) = (mesh.vertices[a as usize], mesh.vertices[b as usize]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Samples `field` (evaluated on unit vectors) on the coarsest icosphere whose
/// longest edge is at most `spacing`.
pub fn rasterize_sphere(field: &dyn Field, spacing: f64) -> Result<SphereGrid, NodalError> {
    if field.dim() != 3 {
        return Err(NodalError::Dimension("sphere fields take points of R^3".into()));
    }
    if !(spacing > 0.0) {
        return Err(NodalError::Resolution(format!("spacing must be positive, got {spacing}")));
    }
    let mut level = 0;
    let mut mesh = icosphere(0);
    let mut h = longest_edge(&mesh);
    while h > spacing {
        level += 1;
        if level > 9 {
            return Err(NodalError::Resolution(format!("spacing {spacing} needs more than 9 subdivisions")));
        }
        mesh = icosphere(level);
        h = longest_edge(&mesh);
    }
    let values = mesh
        .vertices
        .par_iter()
        .map(|v| {
            let f = field.value(v);
            if f.abs() < ZERO_JITTER {
                ZERO_JITTER
            } else {
                f
            }
        })
        .collect();
    Ok(SphereGrid { mesh, values, spacing: h })
}

/// Rasterizes a degree-ℓ sphere sample with at least 10 samples per
/// wavelength 2π/√(ℓ(ℓ+1)).
pub fn rasterize_sphere_sample(sample: &WaveSample, spacing: f64) -> Result<SphereGrid, NodalError> {
    let FieldKind::SphereEnsemble { ell } = sample.spec.kind else {
        return Err(NodalError::Dimension("not a sphere-ensemble sample".into()));
    };
    let l = ell as f64;
    let limit = 2.0 * std::f64::consts::PI / (10.0 * (l * (l + 1.0)).sqrt().max(1.0));
    if spacing > limit {
        return Err(NodalError::Resolution(format!(
            "spacing {spacing} too coarse for degree {ell} (max {limit:.6})"
        )));
    }
    rasterize_sphere(sample, spacing)
}

/// Default spacing for degree ℓ: 16 samples per wavelength.
pub fn default_sphere_spacing(ell: u32) -> f64 {
    let l = ell as f64;
    2.0 * std::f64::consts::PI / (16.0 * (l * (l + 1.0)).sqrt().max(1.0))
}

/// Closed nodal curves on S² (points on the unit sphere).
pub fn extract_components_sphere(grid: &SphereGrid) -> Vec<NodalComponent> {
    let mesh = &grid.mesh;
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut by_edge: HashMap<(u32, u32), u32> = HashMap::new();
    let mut segments = Vec::new();
    let mut vertex = |a: u32, b: u32, points: &mut Vec<Vec<f64>>| -> u32 {
        let key = (a.min(b), a.max(b));
        *by_edge.entry(key).or_insert_with(|| {
            let (fa, fb) = (grid.values[key.0 as usize], grid.values[key.1 as usize]);
            let t = fa / (fa - fb);
            let (p, q) = (mesh.vertices[key.0 as usize], mesh.vertices[key.1 as usize]);
            let x = normalize([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])]);
            points.push(x.to_vec());
            (points.len() - 1) as u32
        })
    };
    for t in &mesh.triangles {
        let pos = t.map(|v| grid.values[v as usize] > 0.0);
        let crossing: Vec<usize> = (0..3).filter(|&k| pos[k] != pos[(k + 1) % 3]).collect();
        if crossing.len() == 2 {
            let e = |k: usize| (t[k], t[(k + 1) % 3]);
            let (a0, b0) = e(crossing[0]);
            let (a1, b1) = e(crossing[1]);
            let p = vertex(a0, b0, &mut points);
            let q = vertex(a1, b1, &mut points);
            segments.push((p, q));
        }
    }
    let boundary = vec![false; points.len()];
    stitch(points, &boundary, &segments, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_is_a_sphere() {
        for level in 0..3 {
            let m = icosphere(level);
            assert_eq!(m.triangles.len(), 20 * 4usize.pow(level));
            assert_eq!(m.euler_characteristic().unwrap(), 2);
            assert!(m.is_consistently_oriented());
            assert!(m.signed_volume() > 0.0);
        }
    }
}
