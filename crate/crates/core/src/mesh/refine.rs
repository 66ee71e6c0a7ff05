//! Newest-vertex bisection.
//!
//! Local vertex `0` of each triangle is its newest vertex; bisecting splits
//! the opposite edge `(v1, v2)` at its midpoint `m` into `(m, v0, v1)` and
//! `(m, v2, v0)`. Conformity is restored by closure: any triangle with a
//! marked edge also gets its refinement edge marked, then triangles are split
//! recursively until no marked edge remains.

use std::collections::{HashMap, HashSet};

use super::{dist, Mesh};
use crate::{Error, Point, Result};

pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Bisects every triangle for which `mark(t)` is true, plus the closure
/// needed to keep the mesh conforming.
pub fn refine_where(mesh: &Mesh, mark: impl Fn(usize) -> bool) -> Result<Mesh> {
    let tris = mesh.triangles();
    let mut marked: HashSet<(usize, usize)> = (0..tris.len())
        .filter(|&t| mark(t))
        .map(|t| key(tris[t][1], tris[t][2]))
        .collect();
    if marked.is_empty() {
        return Ok(mesh.clone());
    }
    loop {
        let mut changed = false;
        for t in tris {
            let refine_edge = key(t[1], t[2]);
            if marked.contains(&refine_edge) {
                continue;
            }
            if marked.contains(&key(t[0], t[1])) || marked.contains(&key(t[2], t[0])) {
                marked.insert(refine_edge);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut vrefs = mesh.vertex_refs().to_vec();
    let mut sorted: Vec<_> = marked.into_iter().collect();
    sorted.sort_unstable();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(sorted.len());
    for (a, b) in sorted {
        let (pa, pb) = (vertices[a], vertices[b]);
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        vrefs.push(0);
        midpoint.insert((a, b), vertices.len() - 1);
    }

    let mut out = Vec::with_capacity(tris.len() * 2);
    let mut trefs = Vec::with_capacity(tris.len() * 2);
    let mut stack = Vec::new();
    for (t, &tri) in tris.iter().enumerate() {
        stack.push(tri);
        while let Some([v0, v1, v2]) = stack.pop() {
            match midpoint.get(&key(v1, v2)) {
                Some(&m) => {
                    stack.push([m, v2, v0]);
                    stack.push([m, v0, v1]);
                }
                None => {
                    out.push([v0, v1, v2]);
                    trefs.push(mesh.triangle_refs()[t]);
                }
            }
        }
    }
    Mesh::with_refs(vertices, out, vrefs, trefs)
}

/// One round of bisection of every element.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    refine_where(mesh, |_| true)
}

/// Target element size as a function of the barycenter.
pub trait GradingRule {
    fn target_size(&self, barycenter: Point) -> f64;
}

impl<F: Fn(Point) -> f64> GradingRule for F {
    fn target_size(&self, barycenter: Point) -> f64 {
        self(barycenter)
    }
}

/// Size rule for the reentrant corner at the origin:
/// `h_K ≤ c_g · max(h_max^{3/2}, |x_K|^{1/3} h_max)`.
#[derive(Clone, Copy, Debug)]
pub struct CornerGrading {
    pub h_max: f64,
    pub c_g: f64,
}

impl GradingRule for CornerGrading {
    fn target_size(&self, x: Point) -> f64 {
        let r = x[0].hypot(x[1]);
        self.c_g * self.h_max.powf(1.5).max(r.cbrt() * self.h_max)
    }
}

/// Bisects until every element satisfies `h_K ≤ rule(x_K)`, `x_K` being the
/// barycenter. Fails once the element count exceeds `cap`.
pub fn refine_graded(mesh: &Mesh, rule: &impl GradingRule, cap: usize) -> Result<Mesh> {
    let mut current = mesh.clone();
    loop {
        let violating: Vec<bool> = (0..current.n_triangles())
            .map(|t| current.element_geometry(t).h > rule.target_size(current.barycenter(t)))
            .collect();
        if !violating.iter().any(|&v| v) {
            return Ok(current);
        }
        current = refine_where(&current, |t| violating[t])?;
        if current.n_triangles() > cap {
            return Err(Error::RefinementBudget { elements: current.n_triangles(), cap });
        }
    }
}

/// Rotates every triangle so that its longest edge (ties broken by the
/// vertex index pair) is the refinement edge. Used for meshes that do not
/// come with a bisection history.
pub fn mark_longest_edges(mesh: &Mesh) -> Result<Mesh> {
    let rotated = mesh
        .triangles()
        .iter()
        .map(|&t| {
            let x = t.map(|v| mesh.vertex(v));
            let best = (0..3)
                .max_by(|&i, &j| {
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    let (c, d) = ((j + 1) % 3, (j + 2) % 3);
                    dist(x[a], x[b])
                        .total_cmp(&dist(x[c], x[d]))
                        .then(key(t[a], t[b]).cmp(&key(t[c], t[d])))
                })
                .unwrap();
            [t[best], t[(best + 1) % 3], t[(best + 2) % 3]]
        })
        .collect();
    mesh.with_rotations(rotated)
}
