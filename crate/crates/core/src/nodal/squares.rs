//! Marching squares at level 0.
//!
//! Cell corners c0 = (i, j), c1 = (i+1, j), c2 = (i+1, j+1), c3 = (i, j+1);
//! edges e0 = c0c1, e1 = c1c2, e2 = c3c2, e3 = c0c3. In the two saddle
//! configurations the corners whose sign differs from the cell-centre
//! average are cut off.

use std::collections::HashMap;

use super::unionfind::UnionFind;
use super::{Geometry, NodalComponent, ScalarGrid};

struct Builder<'a> {
    grid: &'a ScalarGrid,
    points: Vec<[f64; 2]>,
    on_boundary: Vec<bool>,
    by_edge: HashMap<usize, u32>,
}

impl Builder<'_> {
    /// Crossing on the grid edge leaving point (i, j) along `axis`.
    fn vertex(&mut self, i: usize, j: usize, axis: usize) -> u32 {
        let g = self.grid;
        let key = g.index(i, j, 0) * 2 + axis;
        if let Some(&v) = self.by_edge.get(&key) {
            return v;
        }
        let (i2, j2) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
        let a = g.values[g.index(i, j, 0)];
        let b = g.values[g.index(i2, j2, 0)];
        let t = a / (a - b);
        let x = g.origin[0] + g.spacing * (i as f64 + if axis == 0 { t } else { 0.0 });
        let y = g.origin[1] + g.spacing * (j as f64 + if axis == 1 { t } else { 0.0 });
        let (nx, ny) = (g.shape[0], g.shape[1]);
        let boundary = if axis == 0 { j == 0 || j == ny - 1 } else { i == 0 || i == nx - 1 };
        let id = self.points.len() as u32;
        self.points.push([x, y]);
        self.on_boundary.push(boundary);
        self.by_edge.insert(key, id);
        id
    }
}

pub(crate) fn extract(grid: &ScalarGrid) -> Vec<NodalComponent> {
    let (nx, ny) = (grid.shape[0], grid.shape[1]);
    let mut b = Builder { grid, points: Vec::new(), on_boundary: Vec::new(), by_edge: HashMap::new() };
    let mut segments: Vec<(u32, u32)> = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = [
                grid.values[grid.index(i, j, 0)],
                grid.values[grid.index(i + 1, j, 0)],
                grid.values[grid.index(i + 1, j + 1, 0)],
                grid.values[grid.index(i, j + 1, 0)],
            ];
            let pos: [bool; 4] = v.map(|x| x > 0.0);
            let mask = pos.iter().enumerate().fold(0u8, |m, (k, &p)| m | ((p as u8) << k));
            if mask == 0 || mask == 15 {
                continue;
            }
            // edge k joins corners k and (k+1) % 4
            let edge = |b: &mut Builder, k: usize| match k {
                0 => b.vertex(i, j, 0),
                1 => b.vertex(i + 1, j, 1),
                2 => b.vertex(i, j + 1, 0),
                _ => b.vertex(i, j, 1),
            };
            let crossing: Vec<usize> = (0..4).filter(|&k| pos[k] != pos[(k + 1) % 4]).collect();
            if crossing.len() == 2 {
                let (p, q) = (edge(&mut b, crossing[0]), edge(&mut b, crossing[1]));
                segments.push((p, q));
            } else {
                let centre = (v[0] + v[2]) + (v[1] + v[3]);
                let centre_pos = centre >= 0.0;
                // cut off corner c with sign != centre: segment between its two edges
                for c in 0..4 {
                    if pos[c] != centre_pos {
                        let e_in = (c + 3) % 4;
                        let (p, q) = (edge(&mut b, e_in), edge(&mut b, c));
                        segments.push((p, q));
                    }
                }
            }
        }
    }
    stitch(b.points.iter().map(|p| vec![p[0], p[1]]).collect(), &b.on_boundary, &segments, 2)
}

/// Joins segments (each vertex has degree ≤ 2) into polylines, one per
/// connected component, ordered by smallest vertex id.
pub(crate) fn stitch(points: Vec<Vec<f64>>, on_boundary: &[bool], segments: &[(u32, u32)], dim: usize) -> Vec<NodalComponent> {
    let nv = points.len();
    let mut adj = vec![[u32::MAX; 2]; nv];
    let mut uf = UnionFind::new(nv);
    for &(p, q) in segments {
        for (a, c) in [(p, q), (q, p)] {
            let slot = &mut adj[a as usize];
            if slot[0] == u32::MAX {
                slot[0] = c;
            } else {
                debug_assert_eq!(slot[1], u32::MAX, "vertex of degree > 2");
                slot[1] = c;
            }
        }
        uf.union(p, q);
    }
    let (labels, count) = uf.labels();
    let mut first = vec![u32::MAX; count];
    for (v, &l) in labels.iter().enumerate() {
        if first[l as usize] == u32::MAX {
            first[l as usize] = v as u32;
        }
    }

    let degree = |v: u32| adj[v as usize].iter().filter(|&&x| x != u32::MAX).count();
    let walk = |start: u32| -> Vec<u32> {
        let mut path = vec![start];
        let mut prev = u32::MAX;
        let mut cur = start;
        loop {
            let nb = adj[cur as usize];
            let next = if nb[0] != prev && nb[0] != u32::MAX {
                nb[0]
            } else if nb[1] != prev && nb[1] != u32::MAX {
                nb[1]
            } else {
                break;
            };
            // a 2-cycle cannot occur (distinct edges), so this only fires on loops
            if next == start {
                path.push(start);
                break;
            }
            path.push(next);
            prev = cur;
            cur = next;
        }
        path
    };

    let mut out = Vec::with_capacity(count);
    for &v0 in &first {
        // find an endpoint if the component is open
        let mut start = v0;
        if degree(v0) == 2 {
            let p = walk(v0);
            if p.last() != Some(&v0) {
                start = *p.last().unwrap();
            }
        }
        let path = walk(start);
        let touches = path.iter().any(|&v| on_boundary[v as usize]) || path.first() != path.last();
        let pts: Vec<Vec<f64>> = path.iter().map(|&v| points[v as usize].clone()).collect();
        out.push(NodalComponent::new(dim, Geometry::Polyline(pts), touches));
    }
    out
}
