//! Elementwise matrices of the nodal `P_p` basis on a physical triangle.

use crate::basis::{p_basis, quad_rule, AffineMap};
use crate::linalg::DenseMatrix;
use crate::mesh::Mesh;
use crate::Result;

pub(crate) fn affine_map(mesh: &Mesh, t: usize) -> Result<AffineMap> {
    AffineMap::new(mesh.triangle_coords(t)).map_err(|_| crate::Error::DegenerateElement(t))
}

/// `∫_K ∇φ_i · ∇φ_j`.
pub fn element_stiffness(map: &AffineMap, p: usize) -> Result<DenseMatrix> {
    let basis = p_basis(p)?;
    let rule = quad_rule(2 * p)?;
    let n = basis.dim();
    let mut k = DenseMatrix::zeros(n, n);
    let mut g = vec![[0.0; 2]; n];
    for q in 0..rule.len() {
        let w = rule.weights[q] * map.abs_det();
        for (gi, r) in g.iter_mut().zip(basis.eval_grad(rule.xi(q))) {
            *gi = map.push_gradient(r);
        }
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    k.symmetrize();
    Ok(k)
}

/// `∫_K φ_i φ_j`.
pub fn element_mass(map: &AffineMap, p: usize) -> Result<DenseMatrix> {
    let basis = p_basis(p)?;
    let rule = quad_rule(2 * p)?;
    let n = basis.dim();
    let mut m = DenseMatrix::zeros(n, n);
    for q in 0..rule.len() {
        let w = rule.weights[q] * map.abs_det();
        let v = basis.eval(rule.xi(q));
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    m.symmetrize();
    Ok(m)
}

/// `∫_K φ_i`.
pub fn element_moments(map: &AffineMap, p: usize) -> Result<Vec<f64>> {
    let basis = p_basis(p)?;
    let rule = quad_rule(p)?;
    let mut out = vec![0.0; basis.dim()];
    for q in 0..rule.len() {
        let w = rule.weights[q] * map.abs_det();
        for (o, v) in out.iter_mut().zip(basis.eval(rule.xi(q))) {
            *o += w * v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_stiffness_reference() {
        let map = AffineMap::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let k = element_stiffness(&map, 1).unwrap();
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[(i, j)] - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stiffness_kernel_is_constants() {
        let map = AffineMap::new([[0.2, 0.1], [1.4, 0.3], [0.5, 1.7]]).unwrap();
        for p in 1..=3 {
            let k = element_stiffness(&map, p).unwrap();
            let ones = vec![1.0; k.nrows()];
            assert!(k.matvec(&ones).iter().all(|v| v.abs() < 1e-12));
            let m = element_mass(&map, p).unwrap();
            let area = 0.5 * map.abs_det();
            assert!((m.quadratic_form(&ones) - area).abs() < 1e-13);
            let s: f64 = element_moments(&map, p).unwrap().iter().sum();
            assert!((s - area).abs() < 1e-13);
        }
    }
}
