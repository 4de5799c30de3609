use std::collections::HashMap;
use std::f64::consts::PI;

use super::unionfind::UnionFind;
use super::{NodalError, TopologyType};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    /// Undirected edges with the number of triangles using them, sorted.
    pub fn edge_counts(&self) -> Vec<((u32, u32), usize)> {
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        let mut out: Vec<((u32, u32), usize)> = Vec::new();
        for e in edges {
            match out.last_mut() {
                Some((last, c)) if *last == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// χ = V − E + F; every edge must lie on exactly two triangles.
    pub fn euler_characteristic(&self) -> Result<i64, NodalError> {
        let edges = self.edge_counts();
        let open = edges.iter().filter(|&&(_, c)| c != 2).count();
        if open > 0 {
            return Err(NodalError::OpenMesh(open));
        }
        Ok(self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64)
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for t in &self.triangles {
            uf.union(t[0], t[1]);
            uf.union(t[1], t[2]);
        }
        uf.labels().1 <= 1
    }

    /// Every shared edge is traversed in opposite directions by its two
    /// triangles.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut directed: HashMap<(u32, u32), u32> = HashMap::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed.iter().all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)).is_none_or(|&r| r == 1))
    }

    /// Signed enclosed volume (divergence theorem); positive when the
    /// normals point outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| self.vertices[v as usize]);
                (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]))
                    / 6.0
            })
            .sum()
    }

    /// Regular octahedron with outward normals.
    pub fn octahedron() -> Self {
        let vertices = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let triangles = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        Self { vertices, triangles }
    }

    /// Torus from an m × n periodic quad grid, each quad split in two.
    pub fn torus_grid(m: usize, n: usize, major: f64, minor: f64) -> Self {
        let mut vertices = Vec::with_capacity(m * n);
        for i in 0..m {
            let u = 2.0 * PI * i as f64 / m as f64;
            for j in 0..n {
                let v = 2.0 * PI * j as f64 / n as f64;
                let r = major + minor * v.cos();
                vertices.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
            }
        }
        let id = |i: usize, j: usize| ((i % m) * n + (j % n)) as u32;
        let mut triangles = Vec::with_capacity(2 * m * n);
        for i in 0..m {
            for j in 0..n {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self { vertices, triangles }
    }

    /// Disjoint union (vertex ids of `other` shifted).
    pub fn union(&self, other: &TriMesh) -> TriMesh {
        let shift = self.vertices.len() as u32;
        let mut out = self.clone();
        out.vertices.extend_from_slice(&other.vertices);
        out.triangles.extend(other.triangles.iter().map(|t| t.map(|v| v + shift)));
        out
    }
}

/// Genus from χ for a closed connected orientable mesh.
pub fn classify_mesh(mesh: &TriMesh) -> TopologyType {
    let chi = match mesh.euler_characteristic() {
        Ok(chi) => chi,
        Err(e) => return TopologyType::Unclassified { reason: e.to_string() },
    };
    if !mesh.is_connected() {
        return TopologyType::Unclassified { reason: "mesh is not connected".into() };
    }
    if !mesh.is_consistently_oriented() {
        return TopologyType::Unclassified { reason: "no consistent orientation".into() };
    }
    if chi % 2 != 0 || chi > 2 {
        return TopologyType::Unclassified { reason: format!("invalid Euler characteristic {chi}") };
    }
    TopologyType::ClosedSurface { genus: ((2 - chi) / 2) as u32 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedron_and_torus() {
        let o = TriMesh::octahedron();
        assert_eq!(o.euler_characteristic().unwrap(), 2);
        assert!(o.is_consistently_oriented());
        assert!((o.signed_volume() - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(classify_mesh(&o), TopologyType::ClosedSurface { genus: 0 });

        let t = TriMesh::torus_grid(8, 8, 2.0, 0.5);
        assert_eq!((t.vertices.len(), t.edge_counts().len(), t.triangles.len()), (64, 192, 128));
        assert_eq!(t.euler_characteristic().unwrap(), 0);
        assert_eq!(classify_mesh(&t), TopologyType::ClosedSurface { genus: 1 });
    }

    #[test]
    fn disjoint_union_is_additive_but_rejected() {
        let two = TriMesh::octahedron().union(&TriMesh::octahedron());
        assert_eq!(two.euler_characteristic().unwrap(), 4);
        assert!(matches!(classify_mesh(&two), TopologyType::Unclassified { .. }));
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut o = TriMesh::octahedron();
        o.triangles.pop();
        assert!(matches!(o.euler_characteristic(), Err(NodalError::OpenMesh(3))));
    }

    #[test]
    fn flipped_triangle_breaks_orientation() {
        let mut o = TriMesh::octahedron();
        o.triangles[0].swap(0, 1);
        assert!(!o.is_consistently_oriented());
        assert!(matches!(classify_mesh(&o), TopologyType::Unclassified { .. }));
    }
}
