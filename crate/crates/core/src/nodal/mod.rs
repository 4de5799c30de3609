//! Discrete zero sets: rasterization, component extraction and topology.
//!
//! Flat fields are sampled on a [`ScalarGrid`]; the zero set is extracted by
//! marching squares (2D) or a face-loop marching-cubes variant (3D). Fields
//! on S² are sampled on a subdivided icosahedron (see [`sphere`]).

mod cubes;
pub mod export;
mod grid;
mod mesh;
pub mod sphere;
mod squares;
pub mod testfields;
mod unionfind;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::field::Field;

pub use grid::{rasterize, rasterize_sample, ScalarGrid, DEFAULT_SPACING, MAX_SPACING, ZERO_JITTER};
pub use mesh::{classify_mesh, TriMesh};

#[derive(Debug, Error)]
pub enum NodalError {
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("open mesh: {0} edge(s) without exactly two triangles")]
    OpenMesh(usize),
    #[error("component touches the window boundary and cannot be classified")]
    Boundary,
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Diffeomorphism type of a closed component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum TopologyType {
    Circle,
    ClosedSurface { genus: u32 },
    Unclassified { reason: String },
}

impl TopologyType {
    /// Short label used in CSV output: `circle`, `genus_<g>`, `unclassified`.
    pub fn label(&self) -> String {
        match self {
            TopologyType::Circle => "circle".into(),
            TopologyType::ClosedSurface { genus } => format!("genus_{genus}"),
            TopologyType::Unclassified { .. } => "unclassified".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Vertices in order; closed polylines repeat the first point at the end.
    Polyline(Vec<Vec<f64>>),
    Mesh(TriMesh),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodalComponent {
    /// 2 for curves (in the plane or on S²), 3 for surfaces in ℝ³.
    pub dim: usize,
    pub geometry: Geometry,
    pub touches_boundary: bool,
    pub bbox_min: Vec<f64>,
    pub bbox_max: Vec<f64>,
}

impl NodalComponent {
    fn new(dim: usize, geometry: Geometry, touches_boundary: bool) -> Self {
        let pts: Vec<&[f64]> = match &geometry {
            Geometry::Polyline(p) => p.iter().map(|v| v.as_slice()).collect(),
            Geometry::Mesh(m) => m.vertices.iter().map(|v| v.as_slice()).collect(),
        };
        let k = pts.first().map_or(0, |p| p.len());
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for p in pts {
            for i in 0..k {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Self { dim, geometry, touches_boundary, bbox_min: lo, bbox_max: hi }
    }

    pub fn vertex_count(&self) -> usize {
        match &self.geometry {
            Geometry::Polyline(p) => p.len(),
            Geometry::Mesh(m) => m.vertices.len(),
        }
    }

    pub fn vertices(&self) -> Box<dyn Iterator<Item = &[f64]> + '_> {
        match &self.geometry {
            Geometry::Polyline(p) => Box::new(p.iter().map(|v| v.as_slice())),
            Geometry::Mesh(m) => Box::new(m.vertices.iter().map(|v| v.as_slice())),
        }
    }

    pub fn is_closed_polyline(&self) -> bool {
        match &self.geometry {
            Geometry::Polyline(p) => p.len() >= 4 && p.first() == p.last(),
            Geometry::Mesh(_) => false,
        }
    }
}

/// Zero-set components of a 2D or 3D grid.
pub fn extract_components(grid: &ScalarGrid) -> Result<Vec<NodalComponent>, NodalError> {
    match grid.dim {
        2 => Ok(extract_components_2d(grid)),
        3 => extract_components_3d(grid),
        d => Err(NodalError::Dimension(format!("grids must be 2D or 3D, got {d}D"))),
    }
}

/// Marching squares; ambiguous cells are split by the sign of the
/// cell-centre average.
pub fn extract_components_2d(grid: &ScalarGrid) -> Vec<NodalComponent> {
    assert_eq!(grid.dim, 2, "extract_components_2d needs a 2D grid");
    squares::extract(grid)
}

/// Face-loop marching cubes; see the `cubes` module docs for the convention.
pub fn extract_components_3d(grid: &ScalarGrid) -> Result<Vec<NodalComponent>, NodalError> {
    if grid.dim != 3 {
        return Err(NodalError::Dimension(format!("expected a 3D grid, got {}D", grid.dim)));
    }
    cubes::extract(grid)
}

/// t(c) for a closed component.
pub fn classify(component: &NodalComponent) -> Result<TopologyType, NodalError> {
    if component.touches_boundary {
        return Err(NodalError::Boundary);
    }
    match &component.geometry {
        Geometry::Polyline(_) => {
            if component.is_closed_polyline() {
                Ok(TopologyType::Circle)
            } else {
                Ok(TopologyType::Unclassified { reason: "polyline is not closed".into() })
            }
        }
        Geometry::Mesh(m) => Ok(classify_mesh(m)),
    }
}

/// V − E + F of a closed mesh.
pub fn euler_characteristic(mesh: &TriMesh) -> Result<i64, NodalError> {
    mesh.euler_characteristic()
}

/// Largest |f| over the extracted vertices (level-set sanity).
pub fn max_vertex_residual(component: &NodalComponent, field: &dyn Field) -> f64 {
    component.vertices().map(|v| field.value(v).abs()).fold(0.0, f64::max)
}

/// Number of interior (closed) and boundary-touching components.
pub fn count_split(components: &[NodalComponent]) -> (usize, usize) {
    let boundary = components.iter().filter(|c| c.touches_boundary).count();
    (components.len() - boundary, boundary)
}
