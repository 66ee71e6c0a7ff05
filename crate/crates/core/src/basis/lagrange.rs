use std::sync::OnceLock;

use super::{eval_monomial_grads, eval_monomials, monomial_exponents, QuadratureRule};
use crate::linalg::{DenseMatrix, Lu};
use crate::{Error, Result};

/// Nodal `P_q` basis on the principal lattice of the reference triangle.
///
/// Node order: the three vertices, then `q − 1` nodes per edge (edge `e`
/// walked from vertex `e+1` to vertex `e+2`), then interior nodes. Each basis
/// function is stored by its coefficients in the monomials `ξ^i η^j`.
#[derive(Clone, Debug)]
pub struct LagrangeBasisP {
    degree: usize,
    nodes: Vec<[usize; 3]>,
    exps: Vec<(u32, u32)>,
    /// Row `i`: monomial coefficients of basis function `i`.
    coeffs: DenseMatrix,
    vandermonde: DenseMatrix,
}

fn lattice(q: usize) -> Vec<[usize; 3]> {
    let mut nodes = vec![[q, 0, 0], [0, q, 0], [0, 0, q]];
    for e in 0..3 {
        let (a, b) = ((e + 1) % 3, (e + 2) % 3);
        for j in 1..q {
            let mut k = [0; 3];
            k[a] = q - j;
            k[b] = j;
            nodes.push(k);
        }
    }
    for k1 in 1..q {
        for k2 in 1..q.saturating_sub(k1) {
            let k0 = q - k1 - k2;
            if k0 >= 1 {
                nodes.push([k0, k1, k2]);
            }
        }
    }
    nodes
}

impl LagrangeBasisP {
    fn build(q: usize) -> Result<Self> {
        let nodes = lattice(q);
        let exps = monomial_exponents(q);
        let n = nodes.len();
        debug_assert_eq!(n, exps.len());
        // V[l][m] = monomial m at node l
        let mut vandermonde = DenseMatrix::zeros(n, n);
        let mut buf = vec![0.0; n];
        for (l, k) in nodes.iter().enumerate() {
            let xi = [k[1] as f64 / q as f64, k[2] as f64 / q as f64];
            eval_monomials(&exps, xi, &mut buf);
            for (m, &v) in buf.iter().enumerate() {
                vandermonde[(l, m)] = v;
            }
        }
        // φ_i = Σ_m C[i][m] x^m with V Cᵀ = I
        let lu = Lu::new(&vandermonde)?;
        let mut coeffs = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let col = lu.solve(&e);
            for (m, &c) in col.iter().enumerate() {
                coeffs[(i, m)] = c;
            }
        }
        Ok(Self { degree: q, nodes, exps, coeffs, vandermonde })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Integer barycentric coordinates of node `i`, summing to the degree.
    pub fn node(&self, i: usize) -> [usize; 3] {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    pub fn node_barycentric(&self, i: usize) -> [f64; 3] {
        self.nodes[i].map(|k| k as f64 / self.degree as f64)
    }

    pub fn node_xi(&self, i: usize) -> [f64; 2] {
        let b = self.node_barycentric(i);
        [b[1], b[2]]
    }

    pub fn vandermonde(&self) -> &DenseMatrix {
        &self.vandermonde
    }

    pub fn eval(&self, xi: [f64; 2]) -> Vec<f64> {
        let mut mono = vec![0.0; self.dim()];
        eval_monomials(&self.exps, xi, &mut mono);
        self.coeffs.matvec(&mono)
    }

    /// Reference gradients `∇_ξ φ_i`.
    pub fn eval_grad(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let n = self.dim();
        let mut g = vec![[0.0; 2]; n];
        eval_monomial_grads(&self.exps, xi, &mut g);
        (0..n)
            .map(|i| {
                let row = self.coeffs.row(i);
                let gx = row.iter().zip(&g).map(|(c, g)| c * g[0]).sum();
                let gy = row.iter().zip(&g).map(|(c, g)| c * g[1]).sum();
                [gx, gy]
            })
            .collect()
    }

    /// Value of the polynomial with nodal coefficients `c` at `xi`.
    pub fn eval_field(&self, c: &[f64], xi: [f64; 2]) -> f64 {
        super::super::linalg::dot(c, &self.eval(xi))
    }

    pub fn tabulate(&self, rule: &QuadratureRule) -> Tabulation {
        let n = self.dim();
        let mut values = Vec::with_capacity(rule.len() * n);
        let mut grads = Vec::with_capacity(rule.len() * n);
        for q in 0..rule.len() {
            values.extend(self.eval(rule.xi(q)));
            grads.extend(self.eval_grad(rule.xi(q)));
        }
        Tabulation { dim: n, values, grads }
    }

    /// Matrix `T` with `T[j][i] = φ_i(x_j)` for the nodes `x_j` of `target`:
    /// maps nodal coefficients in `self` to nodal values on `target`'s lattice.
    pub fn transfer_to(&self, target: &LagrangeBasisP) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(target.dim(), self.dim());
        for j in 0..target.dim() {
            for (i, v) in self.eval(target.node_xi(j)).into_iter().enumerate() {
                t[(j, i)] = v;
            }
        }
        t
    }
}

/// Basis values and reference gradients at the points of a quadrature rule.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub dim: usize,
    values: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

impl Tabulation {
    #[inline]
    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.dim..(q + 1) * self.dim]
    }

    #[inline]
    pub fn grads(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.dim..(q + 1) * self.dim]
    }
}

pub const MAX_LAGRANGE_DEGREE: usize = crate::MAX_DEGREE + 1;

/// Cached nodal basis of degree `q`, `1 ≤ q ≤ 4`.
pub fn p_basis(q: usize) -> Result<&'static LagrangeBasisP> {
    static BASES: [OnceLock<LagrangeBasisP>; MAX_LAGRANGE_DEGREE + 1] =
        [const { OnceLock::new() }; MAX_LAGRANGE_DEGREE + 1];
    if !(1..=MAX_LAGRANGE_DEGREE).contains(&q) {
        return Err(Error::UnsupportedDegree { degree: q, min: 1, max: MAX_LAGRANGE_DEGREE });
    }
    Ok(BASES[q].get_or_init(|| LagrangeBasisP::build(q).expect("principal lattice is unisolvent")))
}

/// Elementwise Lagrange interpolation `P_{p+1}(K) → P_p(K)`: evaluates the
/// degree-`p+1` polynomial with nodal coefficients `coeffs` at the degree-`p`
/// lattice.
pub fn lagrange_reduce(p: usize, coeffs: &[f64]) -> Result<Vec<f64>> {
    let hi = p_basis(p + 1)?;
    let lo = p_basis(p)?;
    if coeffs.len() != hi.dim() {
        return Err(Error::Dimension(format!("expected {} P_{} coefficients, got {}", hi.dim(), p + 1, coeffs.len())));
    }
    Ok((0..lo.dim()).map(|j| hi.eval_field(coeffs, lo.node_xi(j))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen;

    #[test]
    fn node_counts() {
        for q in 1..=4 {
            assert_eq!(p_basis(q).unwrap().dim(), (q + 1) * (q + 2) / 2);
        }
        assert!(p_basis(0).is_err() && p_basis(5).is_err());
        let b2 = p_basis(2).unwrap();
        assert_eq!(b2.node(3), [0, 1, 1]);
    }

    #[test]
    fn p1_is_barycentric() {
        let b = p_basis(1).unwrap();
        let xi = [0.2, 0.3];
        let v = b.eval(xi);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.2).abs() < 1e-15 && (v[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn kronecker_and_partition_of_unity() {
        for q in 1..=4 {
            let b = p_basis(q).unwrap();
            for j in 0..b.dim() {
                let v = b.eval(b.node_xi(j));
                for (i, vi) in v.iter().enumerate() {
                    let d = if i == j { 1.0 } else { 0.0 };
                    assert!((vi - d).abs() < 1e-12, "q={q}");
                }
            }
            let s: f64 = b.eval([0.13, 0.61]).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            let g = b.eval_grad([0.13, 0.61]);
            assert!(g.iter().map(|g| g[0]).sum::<f64>().abs() < 1e-11);
        }
    }

    #[test]
    fn p3_vandermonde_well_conditioned() {
        let v = p_basis(3).unwrap().vandermonde();
        let e = sym_eigen(&v.transpose().matmul(v)).unwrap();
        let cond = (e.values[e.values.len() - 1] / e.values[0]).sqrt();
        assert!(cond.is_finite() && cond < 1e4, "cond {cond}");
    }

    #[test]
    fn reduce_is_identity_on_degree_p() {
        for p in 1..=3 {
            let lo = p_basis(p).unwrap();
            let hi = p_basis(p + 1).unwrap();
            let c: Vec<f64> = (0..lo.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
            let lifted = lo.transfer_to(hi).matvec(&c);
            let back = lagrange_reduce(p, &lifted).unwrap();
            for (a, b) in back.iter().zip(&c) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduce_hat_products_p1() {
        let hi = p_basis(2).unwrap();
        for a in 0..3 {
            // ψ_a² at the P2 lattice
            let sq: Vec<f64> = (0..hi.dim()).map(|i| hi.node_barycentric(i)[a].powi(2)).collect();
            let red = lagrange_reduce(1, &sq).unwrap();
            for (i, r) in red.iter().enumerate() {
                assert!((r - if i == a { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
            let b = (a + 1) % 3;
            let prod: Vec<f64> =
                (0..hi.dim()).map(|i| hi.node_barycentric(i)[a] * hi.node_barycentric(i)[b]).collect();
            assert!(lagrange_reduce(1, &prod).unwrap().iter().all(|r| r.abs() < 1e-14));
        }
    }

    #[test]
    fn reduce_idempotent() {
        for p in 1..=3 {
            let hi = p_basis(p + 1).unwrap();
            let lo = p_basis(p).unwrap();
            let c: Vec<f64> = (0..hi.dim()).map(|i| ((i * i) as f64).cos()).collect();
            let once = lagrange_reduce(p, &c).unwrap();
            let twice = lagrange_reduce(p, &lo.transfer_to(hi).matvec(&once)).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
