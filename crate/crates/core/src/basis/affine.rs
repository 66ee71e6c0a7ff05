use crate::{Error, Point, Result};

/// Affine map `x = origin + J ξ` from the reference triangle onto a physical
/// triangle with vertices `x[0], x[1], x[2]`.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub origin: Point,
    /// Row-major Jacobian, columns `x1 − x0` and `x2 − x0`.
    pub jac: [[f64; 2]; 2],
    /// Signed determinant, positive for counterclockwise triangles.
    pub det: f64,
    pub inv: [[f64; 2]; 2],
}

impl AffineMap {
    pub fn new(x: [Point; 3]) -> Result<Self> {
        let jac = [[x[1][0] - x[0][0], x[2][0] - x[0][0]], [x[1][1] - x[0][1], x[2][1] - x[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if !det.is_finite() || det.abs() <= 1e-14 * scale * scale || scale == 0.0 {
            return Err(Error::DegenerateElement(0));
        }
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        Ok(Self { origin: x[0], jac, det, inv })
    }

    /// Absolute value of the Jacobian determinant, twice the triangle area.
    pub fn abs_det(&self) -> f64 {
        self.det.abs()
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn map_barycentric(&self, b: [f64; 3]) -> Point {
        self.map([b[1], b[2]])
    }

    pub fn pull_point(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [self.inv[0][0] * d[0] + self.inv[0][1] * d[1], self.inv[1][0] * d[0] + self.inv[1][1] * d[1]]
    }

    /// Physical gradient `J^{-T} ∇_ξ`.
    #[inline]
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [self.inv[0][0] * g[0] + self.inv[1][0] * g[1], self.inv[0][1] * g[0] + self.inv[1][1] * g[1]]
    }

    /// Contravariant Piola transform `J v̂ / det J`.
    #[inline]
    pub fn push_rt_value(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.jac[0][0] * v[0] + self.jac[0][1] * v[1]) / self.det,
            (self.jac[1][0] * v[0] + self.jac[1][1] * v[1]) / self.det,
        ]
    }

    #[inline]
    pub fn push_rt_div(&self, d: f64) -> f64 {
        d / self.det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = AffineMap::new([[1.0, 0.5], [3.0, 1.0], [0.5, 2.0]]).unwrap();
        let xi = [0.3, 0.2];
        let back = m.pull_point(m.map(xi));
        assert!((back[0] - xi[0]).abs() < 1e-14 && (back[1] - xi[1]).abs() < 1e-14);
        assert!(m.det > 0.0);
    }

    #[test]
    fn gradient_of_linear_function() {
        // u(x, y) = 2x − 3y; on the reference element its ξ-gradient is Jᵀ(2, −3)
        let m = AffineMap::new([[0.0, 0.0], [2.0, 1.0], [-1.0, 1.5]]).unwrap();
        let g = [2.0, -3.0];
        let gh = [m.jac[0][0] * g[0] + m.jac[1][0] * g[1], m.jac[0][1] * g[0] + m.jac[1][1] * g[1]];
        let p = m.push_gradient(gh);
        assert!((p[0] - 2.0).abs() < 1e-14 && (p[1] + 3.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(AffineMap::new([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
    }
}
