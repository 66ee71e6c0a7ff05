//! Conforming triangle meshes: construction, MEDIT I/O, newest-vertex
//! bisection, per-element geometry and vertex patches.
//!
//! Triangles are stored positively oriented. Local vertex `0` of every
//! triangle is its newest vertex, so the refinement edge is the edge opposite
//! it (local edge `0`). Edges carry the canonical low-to-high vertex
//! orientation used for Raviart–Thomas sign conventions.

mod build;
mod medit;
mod refine;

use std::collections::HashMap;

pub use build::{build_crisscross, Domain};
pub use medit::{read_medit, write_medit};
pub use refine::{
    mark_longest_edges, refine_graded, refine_uniform, refine_where, CornerGrading, GradingRule, DEFAULT_ELEMENT_CAP,
};

use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    /// `[low, high]` vertex indices.
    pub vertices: [usize; 2],
    /// Triangle traversing the edge from low to high (the edge's left side).
    pub left: Option<usize>,
    /// Triangle traversing the edge from high to low.
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.left.is_none() || self.right.is_none()
    }

    pub fn triangles(&self) -> impl Iterator<Item = usize> {
        self.left.into_iter().chain(self.right)
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    /// Edge opposite local vertex `i`.
    triangle_edges: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
    vertex_triangles: Vec<Vec<usize>>,
    vertex_refs: Vec<i64>,
    triangle_refs: Vec<i64>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.triangles == other.triangles
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        let nt = triangles.len();
        Self::with_refs(vertices, triangles, vec![0; nv], vec![0; nt])
    }

    /// Builds and validates a mesh carrying MEDIT reference tags.
    pub fn with_refs(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        vertex_refs: Vec<i64>,
        triangle_refs: Vec<i64>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidMesh(msg));
        if triangles.is_empty() {
            return invalid("no triangles".into());
        }
        if vertex_refs.len() != vertices.len() || triangle_refs.len() != triangles.len() {
            return invalid("reference tag count mismatch".into());
        }
        if let Some(v) = vertices.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return invalid(format!("vertex {v} has non-finite coordinates"));
        }
        let mut vertex_triangles = vec![Vec::new(); vertices.len()];
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= vertices.len()) {
                return invalid(format!("triangle {t} references vertex {v} out of range"));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return invalid(format!("triangle {t} repeats a vertex"));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let area = signed_area(a, b, c);
            let scale = dist(a, b).max(dist(b, c)).max(dist(a, c));
            if area <= 1e-14 * scale * scale {
                return invalid(format!("triangle {t} has nonpositive area {area:e}"));
            }
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        if let Some(v) = vertex_triangles.iter().position(Vec::is_empty) {
            return invalid(format!("vertex {v} belongs to no triangle"));
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (i, slot) in te.iter_mut().enumerate() {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: key, left: None, right: None });
                    edges.len() - 1
                });
                let side = if a < b { &mut edges[e].left } else { &mut edges[e].right };
                if side.is_some() {
                    return invalid(format!(
                        "edge ({}, {}) is shared by more than two triangles or inconsistently oriented",
                        key[0], key[1]
                    ));
                }
                *side = Some(t);
                *slot = e;
            }
            triangle_edges.push(te);
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }
        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_vertex,
            vertex_triangles,
            vertex_refs,
            triangle_refs,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_coords(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Edge indices of triangle `t`; entry `i` is opposite local vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edges[e].is_boundary()
    }

    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Triangles containing vertex `v`, in ascending order.
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn vertex_refs(&self) -> &[i64] {
        &self.vertex_refs
    }

    pub fn triangle_refs(&self) -> &[i64] {
        &self.triangle_refs
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        signed_area(a, b, c)
    }

    pub fn barycenter(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_coords(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn element_geometry(&self, t: usize) -> ElementGeometry {
        ElementGeometry::of_triangle(self.triangle_coords(t))
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.element_geometry(t).h).fold(0.0, f64::max)
    }

    pub fn max_kappa(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.element_geometry(t).kappa).fold(0.0, f64::max)
    }

    pub fn vertex_patch(&self, a: usize) -> VertexPatch {
        let elements = self.vertex_triangles[a].clone();
        let h_a = elements.iter().map(|&t| self.element_geometry(t).h).fold(0.0, f64::max);
        let mut vertices: Vec<usize> = elements.iter().flat_map(|&t| self.triangles[t]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<usize> = elements.iter().flat_map(|&t| self.triangle_edges[t]).collect();
        edges.sort_unstable();
        edges.dedup();
        VertexPatch { center: a, elements, h_a, is_boundary: self.boundary_vertex[a], vertices, edges }
    }

    /// Same vertices and tags, triangles replaced by `triangles` (expected to
    /// be rotations of the current ones).
    pub(crate) fn with_rotations(&self, triangles: Vec<[usize; 3]>) -> Result<Self> {
        Self::with_refs(self.vertices.clone(), triangles, self.vertex_refs.clone(), self.triangle_refs.clone())
    }
}

/// Diameter, inscribed-circle diameter, shape regularity and vertex-to-
/// opposite-edge heights of one triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementGeometry {
    pub h: f64,
    pub rho: f64,
    pub kappa: f64,
    /// `tau[i]`: distance from local vertex `i` to the line through the opposite edge.
    pub tau: [f64; 3],
}

impl ElementGeometry {
    pub fn of_triangle(x: [Point; 3]) -> Self {
        let area = signed_area(x[0], x[1], x[2]).abs();
        let opposite = [dist(x[1], x[2]), dist(x[2], x[0]), dist(x[0], x[1])];
        let h = opposite.iter().copied().fold(0.0, f64::max);
        let semi = 0.5 * opposite.iter().sum::<f64>();
        let rho = 2.0 * area / semi;
        let tau = opposite.map(|l| 2.0 * area / l);
        Self { h, rho, kappa: h / rho, tau }
    }
}

/// The elements sharing a vertex, i.e. the support of its hat function.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexPatch {
    pub center: usize,
    /// Global triangle indices, ascending.
    pub elements: Vec<usize>,
    /// Largest element diameter in the patch.
    pub h_a: f64,
    pub is_boundary: bool,
    /// Global vertex indices touched by the patch, ascending.
    pub vertices: Vec<usize>,
    /// Global edge indices touched by the patch, ascending.
    pub edges: Vec<usize>,
}

impl VertexPatch {
    /// Position of the patch center among the local vertices of `element`.
    pub fn center_local_index(&self, mesh: &Mesh, element: usize) -> usize {
        mesh.triangle(element)
            .iter()
            .position(|&v| v == self.center)
            .expect("patch element does not contain the patch center")
    }
}

pub fn vertex_patches(mesh: &Mesh) -> Vec<VertexPatch> {
    (0..mesh.n_vertices()).map(|a| mesh.vertex_patch(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn right_triangle_geometry() {
        let g = ElementGeometry::of_triangle([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(close(g.h, 2f64.sqrt()));
        assert!(close(g.rho, 2.0 - 2f64.sqrt()));
        assert!(close(g.tau[0], 1.0 / 2f64.sqrt()));
        assert!(close(g.tau[1], 1.0) && close(g.tau[2], 1.0));
    }

    #[test]
    fn equilateral_kappa() {
        let g = ElementGeometry::of_triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        assert!(close(g.kappa, 3f64.sqrt()));
    }

    #[test]
    fn crisscross_cell_tau() {
        let g = ElementGeometry::of_triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]]);
        assert!(close(g.tau[2], 0.5));
        assert!(close(g.h, 1.0));
        assert!(close(g.h / g.tau[2], 2.0));
    }

    #[test]
    fn rejects_clockwise_triangle() {
        let err = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 2, 1]]).unwrap_err();
        assert!(err.to_string().contains("nonpositive area"));
    }

    #[test]
    fn rejects_non_manifold_edge() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0]];
        // three triangles on edge (0,1): two of them traverse it the same way
        let t = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert!(Mesh::new(v, t).is_err());
    }

    #[test]
    fn rejects_unused_vertex() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]];
        assert!(Mesh::new(v, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn edge_left_right() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let m = Mesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let diag = m.edges().iter().find(|e| e.vertices == [0, 2]).unwrap();
        // triangle 0 walks 2 -> 0, triangle 1 walks 0 -> 2
        assert_eq!(diag.left, Some(1));
        assert_eq!(diag.right, Some(0));
        assert!(!diag.is_boundary());
        assert_eq!(m.edges().iter().filter(|e| e.is_boundary()).count(), 4);
    }
}
