//! OBJ / CSV export of nodal components with a JSON sidecar.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{classify, Geometry, NodalComponent, TriMesh};
use crate::ensemble::FieldSpec;
use crate::field::Window;

pub const SIDECAR_SCHEMA: &str = "monowave.nodal_export/1";

/// Describes where exported components came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportSidecar {
    pub schema: String,
    pub spec: Option<FieldSpec>,
    pub window: Option<Window>,
    pub spacing: f64,
    pub interior_components: usize,
    pub boundary_components: usize,
    pub files: Vec<String>,
}

pub fn obj_string(mesh: &TriMesh) -> String {
    let mut s = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

/// One row per polyline vertex: `component,vertex,x,y[,z]`.
pub fn polylines_csv(components: &[NodalComponent]) -> String {
    let width = components
        .iter()
        .find_map(|c| match &c.geometry {
            Geometry::Polyline(p) => p.first().map(|v| v.len()),
            Geometry::Mesh(_) => None,
        })
        .unwrap_or(2);
    let mut s = String::from(if width == 3 { "component,vertex,x,y,z\n" } else { "component,vertex,x,y\n" });
    for (ci, c) in components.iter().enumerate() {
        if let Geometry::Polyline(p) = &c.geometry {
            for (vi, v) in p.iter().enumerate() {
                let coords: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{ci},{vi},{}", coords.join(","));
            }
        }
    }
    s
}

/// One row per component: index, dimension, boundary flag, type, size.
pub fn components_csv(components: &[NodalComponent]) -> String {
    let mut s = String::from("component,dim,touches_boundary,topology,vertices\n");
    for (ci, c) in components.iter().enumerate() {
        let topo = classify(c).map(|t| t.label()).unwrap_or_else(|_| "boundary".into());
        let _ = writeln!(s, "{ci},{},{},{topo},{}", c.dim, c.touches_boundary, c.vertex_count());
    }
    s
}

/// Writes `<stem>_components.csv`, the geometry (`<stem>_polylines.csv` or
/// one `<stem>_<k>.obj` per surface) and `<stem>_manifest.json`.
pub fn write_components(
    dir: &Path,
    stem: &str,
    components: &[NodalComponent],
    spec: Option<&FieldSpec>,
    window: Option<&Window>,
    spacing: f64,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    fn put(dir: &Path, written: &mut Vec<PathBuf>, name: String, body: &str) -> io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    }
    put(dir, &mut written, format!("{stem}_components.csv"), &components_csv(components))?;
    if components.iter().any(|c| matches!(c.geometry, Geometry::Polyline(_))) {
        put(dir, &mut written, format!("{stem}_polylines.csv"), &polylines_csv(components))?;
    }
    for (ci, c) in components.iter().enumerate() {
        if let Geometry::Mesh(m) = &c.geometry {
            let body = format!("# monowave nodal component {ci}\n# manifest: {stem}_manifest.json\n{}", obj_string(m));
            put(dir, &mut written, format!("{stem}_{ci}.obj"), &body)?;
        }
    }
    let (interior, boundary) = super::count_split(components);
    let sidecar = ExportSidecar {
        schema: SIDECAR_SCHEMA.into(),
        spec: spec.cloned(),
        window: window.cloned(),
        spacing,
        interior_components: interior,
        boundary_components: boundary,
        files: written.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect(),
    };
    let body = serde_json::to_string_pretty(&sidecar).map_err(io::Error::other)?;
    put(dir, &mut written, format!("{stem}_manifest.json"), &body)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_is_one_based() {
        let s = obj_string(&TriMesh::octahedron());
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 6);
        assert!(s.lines().any(|l| l == "f 1 3 5"));
    }
}
