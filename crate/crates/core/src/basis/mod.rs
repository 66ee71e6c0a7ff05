//! Reference-triangle polynomial machinery: quadrature, nodal `P_q` Lagrange
//! bases on the principal lattice, `RT_p` Raviart–Thomas bases and the affine
//! and contravariant Piola push-forwards.
//!
//! The reference triangle has vertices `(0,0)`, `(1,0)`, `(0,1)`; reference
//! coordinates `(ξ, η)` coincide with the barycentric coordinates
//! `(λ₁, λ₂)`, and `λ₀ = 1 − ξ − η`. Local edge `e` is opposite local vertex
//! `e` and runs from vertex `e+1` to vertex `e+2` (indices mod 3).

mod affine;
mod lagrange;
mod quadrature;
mod rt;

pub use affine::AffineMap;
pub use lagrange::{lagrange_reduce, p_basis, LagrangeBasisP, Tabulation};
pub use quadrature::{gauss_legendre_01, monomial_integral, quad_rule, QuadratureRule};
pub use rt::{legendre_01, rt_basis, RtBasis, RtTabulation};

/// Exponents `(i, j)` of the monomials `ξ^i η^j` with `i + j ≤ q`, ordered
/// by total degree, then by decreasing `i`.
pub(crate) fn monomial_exponents(q: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity((q + 1) * (q + 2) / 2);
    for d in 0..=q as u32 {
        for j in 0..=d {
            out.push((d - j, j));
        }
    }
    out
}

pub(crate) fn eval_monomials(exps: &[(u32, u32)], xi: [f64; 2], out: &mut [f64]) {
    for (o, &(i, j)) in out.iter_mut().zip(exps) {
        *o = xi[0].powi(i as i32) * xi[1].powi(j as i32);
    }
}

/// Partial derivatives of the monomials with respect to `ξ` and `η`.
pub(crate) fn eval_monomial_grads(exps: &[(u32, u32)], xi: [f64; 2], out: &mut [[f64; 2]]) {
    for (o, &(i, j)) in out.iter_mut().zip(exps) {
        let dx = if i == 0 { 0.0 } else { i as f64 * xi[0].powi(i as i32 - 1) * xi[1].powi(j as i32) };
        let dy = if j == 0 { 0.0 } else { j as f64 * xi[0].powi(i as i32) * xi[1].powi(j as i32 - 1) };
        *o = [dx, dy];
    }
}

/// Reference vertices.
pub const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
