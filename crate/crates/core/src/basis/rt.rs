use std::sync::OnceLock;

use super::{eval_monomial_grads, eval_monomials, gauss_legendre_01, monomial_exponents, quad_rule, QuadratureRule};
use super::REF_VERTICES;
use crate::linalg::{DenseMatrix, Lu};
use crate::{Error, Result};

/// Shifted Legendre polynomial `L_k` on `[0, 1]`, normalized by `L_k(1) = 1`.
pub fn legendre_01(k: usize, t: f64) -> f64 {
    let x = 2.0 * t - 1.0;
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return 1.0;
    }
    for n in 1..k {
        let p2 = ((2 * n + 1) as f64 * x * p1 - n as f64 * p0) / (n + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `RT_p` basis on the reference triangle, dual to the moment degrees of
/// freedom
///
/// * edge `e`, `k = 0..=p`: `∫₀¹ v̂(x(t))·(d_y, −d_x) L_k(t) dt`, where
///   `x(t)` runs from local vertex `e+1` to `e+2` and `d` is that edge
///   vector (so `(d_y, −d_x) dt` is the outward normal line element);
/// * interior: `∫ v̂_c ξ^i η^j` for `c ∈ {0, 1}` and `i + j ≤ p − 1`.
///
/// Local DOF index of edge moment `(e, k)` is `e (p+1) + k`; interior
/// moments follow.
#[derive(Clone, Debug)]
pub struct RtBasis {
    degree: usize,
    /// Monomials of `[P_p]`, used componentwise.
    full: Vec<(u32, u32)>,
    /// Homogeneous degree-`p` monomials multiplying `x`.
    homog: Vec<(u32, u32)>,
    /// Row `i`: coefficients of basis function `i` in the prime basis.
    coeffs: DenseMatrix,
}

impl RtBasis {
    fn n_prime(&self) -> usize {
        2 * self.full.len() + self.homog.len()
    }

    fn build(p: usize) -> Result<Self> {
        let full = monomial_exponents(p);
        let homog: Vec<(u32, u32)> = full.iter().copied().filter(|&(i, j)| (i + j) as usize == p).collect();
        let mut me = Self { degree: p, full, homog, coeffs: DenseMatrix::zeros(0, 0) };
        let n = me.n_prime();
        if n != (p + 1) * (p + 3) {
            return Err(Error::Dimension(format!("RT_{p} prime basis has {n} members")));
        }
        // G[dof][prime]
        let mut g = DenseMatrix::zeros(n, n);
        for m in 0..n {
            let col = me.apply_dofs(|xi| me.eval_prime(xi)[m]);
            g.set_column(m, &col);
        }
        let lu = Lu::new(&g)?;
        let mut coeffs = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let x = lu.solve(&e);
            // φ_i = Σ_m (G⁻¹)[m][i] prime_m
            for (m, &c) in x.iter().enumerate() {
                coeffs[(i, m)] = c;
            }
        }
        me.coeffs = coeffs;
        Ok(me)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        (self.degree + 1) * (self.degree + 3)
    }

    pub fn dofs_per_edge(&self) -> usize {
        self.degree + 1
    }

    pub fn n_interior(&self) -> usize {
        self.degree * (self.degree + 1)
    }

    pub fn edge_dof(&self, edge: usize, k: usize) -> usize {
        edge * (self.degree + 1) + k
    }

    fn eval_prime(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let xi = centered(xi);
        let nf = self.full.len();
        let mut mono = vec![0.0; nf];
        eval_monomials(&self.full, xi, &mut mono);
        let mut out = Vec::with_capacity(self.n_prime());
        out.extend(mono.iter().map(|&m| [m, 0.0]));
        out.extend(mono.iter().map(|&m| [0.0, m]));
        let mut h = vec![0.0; self.homog.len()];
        eval_monomials(&self.homog, xi, &mut h);
        out.extend(h.iter().map(|&m| [xi[0] * m, xi[1] * m]));
        out
    }

    fn eval_prime_div(&self, xi: [f64; 2]) -> Vec<f64> {
        let xi = centered(xi);
        let nf = self.full.len();
        let mut g = vec![[0.0; 2]; nf];
        eval_monomial_grads(&self.full, xi, &mut g);
        let mut out = Vec::with_capacity(self.n_prime());
        out.extend(g.iter().map(|g| g[0]));
        out.extend(g.iter().map(|g| g[1]));
        let mut h = vec![0.0; self.homog.len()];
        eval_monomials(&self.homog, xi, &mut h);
        // div(x m) = (2 + deg m) m for homogeneous m
        out.extend(h.iter().map(|&m| (2 + self.degree) as f64 * m));
        out
    }

    /// Applies every DOF functional to the reference field `v`.
    pub fn apply_dofs(&self, v: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let p = self.degree;
        let mut out = Vec::with_capacity(self.dim());
        let (t, w) = gauss_legendre_01(p + 2);
        for e in 0..3 {
            let a = REF_VERTICES[(e + 1) % 3];
            let b = REF_VERTICES[(e + 2) % 3];
            let d = [b[0] - a[0], b[1] - a[1]];
            let vals: Vec<f64> = t
                .iter()
                .map(|&t| {
                    let val = v([a[0] + t * d[0], a[1] + t * d[1]]);
                    val[0] * d[1] - val[1] * d[0]
                })
                .collect();
            for k in 0..=p {
                out.push(vals.iter().zip(&t).zip(&w).map(|((f, &t), w)| f * legendre_01(k, t) * w).sum());
            }
        }
        if p >= 1 {
            let test = monomial_exponents(p - 1);
            let rule = quad_rule(2 * p).expect("exactness 2p is available");
            let mut mono = vec![0.0; test.len()];
            let mut acc = vec![0.0; 2 * test.len()];
            for q in 0..rule.len() {
                let xi = rule.xi(q);
                let val = v(xi);
                eval_monomials(&test, xi, &mut mono);
                for (m, &tm) in mono.iter().enumerate() {
                    acc[m] += rule.weights[q] * val[0] * tm;
                    acc[test.len() + m] += rule.weights[q] * val[1] * tm;
                }
            }
            out.extend(acc);
        }
        out
    }

    pub fn eval(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let prime = self.eval_prime(xi);
        (0..self.dim())
            .map(|i| {
                let row = self.coeffs.row(i);
                let x = row.iter().zip(&prime).map(|(c, v)| c * v[0]).sum();
                let y = row.iter().zip(&prime).map(|(c, v)| c * v[1]).sum();
                [x, y]
            })
            .collect()
    }

    pub fn eval_div(&self, xi: [f64; 2]) -> Vec<f64> {
        self.coeffs.matvec(&self.eval_prime_div(xi))
    }

    pub fn tabulate(&self, rule: &QuadratureRule) -> RtTabulation {
        let n = self.dim();
        let mut values = Vec::with_capacity(rule.len() * n);
        let mut divs = Vec::with_capacity(rule.len() * n);
        for q in 0..rule.len() {
            values.extend(self.eval(rule.xi(q)));
            divs.extend(self.eval_div(rule.xi(q)));
        }
        RtTabulation { dim: n, values, divs }
    }
}

/// Reference `RT_p` values and divergences at quadrature points.
#[derive(Clone, Debug)]
pub struct RtTabulation {
    pub dim: usize,
    values: Vec<[f64; 2]>,
    divs: Vec<f64>,
}

impl RtTabulation {
    #[inline]
    pub fn values(&self, q: usize) -> &[[f64; 2]] {
        &self.values[q * self.dim..(q + 1) * self.dim]
    }

    #[inline]
    pub fn divs(&self, q: usize) -> &[f64] {
        &self.divs[q * self.dim..(q + 1) * self.dim]
    }
}

// The prime basis is expressed in coordinates centered at the barycenter,
// which keeps the p = 3 moment matrix well conditioned.
fn centered(xi: [f64; 2]) -> [f64; 2] {
    [xi[0] - 1.0 / 3.0, xi[1] - 1.0 / 3.0]
}

/// Cached `RT_p` basis, `1 ≤ p ≤ 3`.
pub fn rt_basis(p: usize) -> Result<&'static RtBasis> {
    static BASES: [OnceLock<RtBasis>; crate::MAX_DEGREE + 1] = [const { OnceLock::new() }; crate::MAX_DEGREE + 1];
    if !(1..=crate::MAX_DEGREE).contains(&p) {
        return Err(Error::UnsupportedDegree { degree: p, min: 1, max: crate::MAX_DEGREE });
    }
    Ok(BASES[p].get_or_init(|| RtBasis::build(p).expect("RT moment DOFs are unisolvent")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::AffineMap;

    #[test]
    fn dimensions() {
        assert_eq!(rt_basis(1).unwrap().dim(), 8);
        assert_eq!(rt_basis(2).unwrap().dim(), 15);
        assert_eq!(rt_basis(3).unwrap().dim(), 24);
        assert!(rt_basis(0).is_err() && rt_basis(4).is_err());
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_01(0, 0.3), 1.0);
        assert!((legendre_01(1, 0.25) + 0.5).abs() < 1e-15);
        assert!((legendre_01(2, 0.5) + 0.5).abs() < 1e-15);
        assert!((legendre_01(3, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dofs_of_basis_are_identity() {
        for p in 1..=3 {
            let b = rt_basis(p).unwrap();
            for j in 0..b.dim() {
                let d = b.apply_dofs(|xi| b.eval(xi)[j]);
                for (i, v) in d.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((v - e).abs() < 1e-12, "p={p} i={i} j={j} {v}");
                }
            }
        }
    }

    #[test]
    fn divergence_theorem_reference() {
        // ∫ div φ = total outward flux = the k = 0 edge moments summed
        for p in 1..=3 {
            let b = rt_basis(p).unwrap();
            let rule = quad_rule(2 * p + 2).unwrap();
            for j in 0..b.dim() {
                let int: f64 = (0..rule.len()).map(|q| rule.weights[q] * b.eval_div(rule.xi(q))[j]).sum();
                let flux: f64 = (0..3).map(|e| if j == b.edge_dof(e, 0) { 1.0 } else { 0.0 }).sum();
                assert!((int - flux).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_flux_continuity_between_two_elements() {
        // K1 = (0,0),(1,0),(0,1); K2 = (1,1),(0,1),(1,0). Shared edge
        // (1,0)-(0,1) is local edge 0 in both, traversed in opposite senses.
        let k1 = AffineMap::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let k2 = AffineMap::new([[1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let n = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        for p in 1..=3 {
            let b = rt_basis(p).unwrap();
            for k in 0..=p {
                // Global orientation follows K1; K2 sees it reversed.
                let sign2 = if k % 2 == 0 { -1.0 } else { 1.0 };
                for s in 0..5 {
                    let t = (s as f64 + 0.5) / 5.0;
                    let x = [1.0 - t, t];
                    let v1 = k1.push_rt_value(b.eval(k1.pull_point(x))[b.edge_dof(0, k)]);
                    let v2 = k2.push_rt_value(b.eval(k2.pull_point(x))[b.edge_dof(0, k)]);
                    let f1 = v1[0] * n[0] + v1[1] * n[1];
                    let f2 = sign2 * (v2[0] * n[0] + v2[1] * n[1]);
                    assert!((f1 - f2).abs() < 1e-12, "p={p} k={k} t={t}: {f1} vs {f2}");
                }
            }
        }
    }
}
