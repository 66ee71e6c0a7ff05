use std::collections::HashMap;

use super::Mesh;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `(0, 1)²`
    UnitSquare,
    /// `(−1, 1)²`
    Square2,
    /// `(−1, 1)² ∖ [0, 1]²`, reentrant corner at the origin.
    LShape,
}

impl Domain {
    fn origin_and_side(self) -> (Point, f64) {
        match self {
            Domain::UnitSquare => ([0.0, 0.0], 1.0),
            Domain::Square2 | Domain::LShape => ([-1.0, -1.0], 2.0),
        }
    }

    pub fn contains(self, x: Point) -> bool {
        let (o, s) = self.origin_and_side();
        let inside = x[0] > o[0] && x[0] < o[0] + s && x[1] > o[1] && x[1] < o[1] + s;
        match self {
            Domain::LShape => inside && !(x[0] >= 0.0 && x[1] >= 0.0),
            _ => inside,
        }
    }

    pub fn area(self) -> f64 {
        match self {
            Domain::UnitSquare => 1.0,
            Domain::Square2 => 4.0,
            Domain::LShape => 3.0,
        }
    }
}

/// Cartesian grid of `n × n` squares over the bounding square of `domain`,
/// each square split into four triangles through its barycenter. For the
/// L-shape, squares inside `[0, 1]²` are dropped, so `n` must be even.
///
/// The barycenter is local vertex `0` of each triangle, which makes the
/// square side the refinement edge for newest-vertex bisection.
pub fn build_crisscross(n: usize, domain: Domain) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("crisscross needs n >= 1".into()));
    }
    if domain == Domain::LShape && !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument("L-shape crisscross needs an even n".into()));
    }
    let (o, side) = domain.origin_and_side();
    let h = side / n as f64;
    let keep = |i: usize, j: usize| domain != Domain::LShape || !(2 * i >= n && 2 * j >= n);

    let mut vertices = Vec::new();
    let mut grid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut grid_vertex = |i: usize, j: usize, vertices: &mut Vec<Point>| -> usize {
        *grid.entry((i, j)).or_insert_with(|| {
            vertices.push([o[0] + i as f64 * h, o[1] + j as f64 * h]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !keep(i, j) {
                continue;
            }
            let sw = grid_vertex(i, j, &mut vertices);
            let se = grid_vertex(i + 1, j, &mut vertices);
            let ne = grid_vertex(i + 1, j + 1, &mut vertices);
            let nw = grid_vertex(i, j + 1, &mut vertices);
            vertices.push([o[0] + (i as f64 + 0.5) * h, o[1] + (j as f64 + 0.5) * h]);
            let c = vertices.len() - 1;
            triangles.extend_from_slice(&[[c, sw, se], [c, se, ne], [c, ne, nw], [c, nw, sw]]);
        }
    }
    Mesh::new(vertices, triangles)
}
