use std::collections::{HashMap, HashSet};

use crate::basis::p_basis;
use crate::mesh::Mesh;
use crate::{Point, Result};

/// Continuous `P_p` degrees of freedom over a set of elements, with every
/// Lagrange node on the boundary of their union eliminated.
///
/// Over all elements this is the global space with zero boundary trace; over
/// the elements of a vertex patch it is the patch space vanishing on the
/// patch boundary. Nodes shared between elements are identified through
/// their global vertex support, and dofs are numbered by first appearance.
#[derive(Clone, Debug)]
pub struct LagrangeDofMap {
    degree: usize,
    n_local: usize,
    elements: Vec<usize>,
    element_dofs: Vec<Option<usize>>,
    n_dofs: usize,
    points: Vec<Point>,
}

type NodeKey = [(usize, usize); 3];

fn node_key(tri: [usize; 3], k: [usize; 3]) -> NodeKey {
    let mut key = [(usize::MAX, 0); 3];
    for i in 0..3 {
        if k[i] > 0 {
            key[i] = (tri[i], k[i]);
        }
    }
    key.sort_unstable();
    key
}

impl LagrangeDofMap {
    pub fn new(mesh: &Mesh, p: usize, elements: &[usize]) -> Result<Self> {
        let basis = p_basis(p)?;
        let n_local = basis.dim();
        let mut edge_count: HashMap<usize, usize> = HashMap::new();
        for &t in elements {
            for e in mesh.triangle_edges(t) {
                *edge_count.entry(e).or_insert(0) += 1;
            }
        }
        let boundary_edges: HashSet<usize> =
            edge_count.iter().filter(|&(_, &c)| c == 1).map(|(&e, _)| e).collect();
        let boundary_vertices: HashSet<usize> =
            boundary_edges.iter().flat_map(|&e| mesh.edges()[e].vertices).collect();

        let mut ids: HashMap<NodeKey, usize> = HashMap::new();
        let mut points = Vec::new();
        let mut element_dofs = Vec::with_capacity(elements.len() * n_local);
        for &t in elements {
            let tri = mesh.triangle(t);
            let edges = mesh.triangle_edges(t);
            let x = mesh.triangle_coords(t);
            for j in 0..n_local {
                let k = basis.node(j);
                let support = k.iter().filter(|&&v| v > 0).count();
                let on_boundary = match support {
                    1 => boundary_vertices.contains(&tri[k.iter().position(|&v| v > 0).unwrap()]),
                    2 => boundary_edges.contains(&edges[k.iter().position(|&v| v == 0).unwrap()]),
                    _ => false,
                };
                if on_boundary {
                    element_dofs.push(None);
                    continue;
                }
                let next = ids.len();
                let id = *ids.entry(node_key(tri, k)).or_insert(next);
                if id == next {
                    let b = basis.node_barycentric(j);
                    points.push([
                        b[0] * x[0][0] + b[1] * x[1][0] + b[2] * x[2][0],
                        b[0] * x[0][1] + b[1] * x[1][1] + b[2] * x[2][1],
                    ]);
                }
                element_dofs.push(Some(id));
            }
        }
        Ok(Self { degree: p, n_local, elements: elements.to_vec(), element_dofs, n_dofs: ids.len(), points })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Nodes per element.
    pub fn n_local(&self) -> usize {
        self.n_local
    }

    /// Global triangle ids, in the order used by [`Self::element_dofs`].
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    /// Dof of each local node of the `k`-th element of the set, `None` on the boundary.
    pub fn element_dofs(&self, k: usize) -> &[Option<usize>] {
        &self.element_dofs[k * self.n_local..(k + 1) * self.n_local]
    }

    /// Coordinates of each dof's node.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Element blocks (nodal values) of the field with coefficients `c`.
    pub fn expand(&self, c: &[f64]) -> Vec<f64> {
        self.element_dofs.iter().map(|d| d.map_or(0.0, |d| c[d])).collect()
    }
}
