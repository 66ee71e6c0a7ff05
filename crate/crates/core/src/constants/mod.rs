//! Per-vertex constants `ρ_a` and `λ_a`, their elementwise and global
//! maxima, and the explicit factor bounding the local-best error by a higher
//! seminorm.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::linalg::{gen_eig_max, DenseMatrix, GenEigDiagnostics, GenEigOptions};
use crate::mesh::{Mesh, VertexPatch};
use crate::reconstruct::{PatchConformingSpace, PatchFluxSpace};
use crate::{exec, Error, Result};

/// `1 + (1/π) max_{K ∈ T_a} h_K / τ_K^a`.
pub fn rho_a(mesh: &Mesh, patch: &VertexPatch) -> f64 {
    let ratio = patch
        .elements
        .iter()
        .map(|&t| {
            let g = mesh.element_geometry(t);
            g.h / g.tau[patch.center_local_index(mesh, t)]
        })
        .fold(0.0, f64::max);
    1.0 + ratio / PI
}

/// The matrices of the patch eigenproblem, all in the broken `P_p(T_a)`
/// coordinates except `m`, which lives on `X_h^a`.
///
/// * `d`: `u_h ↦ I_h^p(ψ_a u_h) − s_h^a(u_h)`,
/// * `r`: `u_h ↦ r_h^a(u_h)`,
/// * `k`: broken stiffness,
/// * `m`: RT mass matrix.
#[derive(Clone, Debug)]
pub struct EigenAssembly {
    pub d: DenseMatrix,
    pub r: DenseMatrix,
    pub k: DenseMatrix,
    pub m: DenseMatrix,
}

impl EigenAssembly {
    pub fn new(conforming: &PatchConformingSpace, flux: &PatchFluxSpace) -> Result<Self> {
        let n = conforming.n_broken();
        if flux.n_y() != n {
            return Err(Error::Dimension(format!("patch spaces disagree: {} vs {} broken dofs", n, flux.n_y())));
        }
        let mut d = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            d.set_column(j, &conforming.defect(&e)?.0);
            e[j] = 0.0;
        }
        Ok(Self { d, r: flux.response_matrix(), k: conforming.broken_stiffness(), m: flux.mass().clone() })
    }

    /// `(DᵀKD, RᵀMR)`.
    pub fn pencil(&self) -> (DenseMatrix, DenseMatrix) {
        let mut a = self.k.congruence(&self.d);
        let mut b = self.m.congruence(&self.r);
        a.symmetrize();
        b.symmetrize();
        (a, b)
    }

    /// `λ_a`: square root of the largest pencil eigenvalue.
    pub fn lambda(&self, opts: GenEigOptions) -> Result<(f64, GenEigDiagnostics)> {
        let (a, b) = self.pencil();
        let (mu, diag) = gen_eig_max(&a, &b, opts)?;
        Ok((mu.sqrt(), diag))
    }
}

/// Constants of one vertex patch.
#[derive(Clone, Debug)]
pub struct PatchConstants {
    pub vertex: usize,
    pub is_boundary: bool,
    pub rho: f64,
    pub lambda: f64,
    pub diagnostics: GenEigDiagnostics,
}

/// `λ_a` of the patch around vertex `patch.center`.
pub fn lambda_a(mesh: &Mesh, patch: &VertexPatch, p: usize) -> Result<(f64, GenEigDiagnostics)> {
    let conforming = PatchConformingSpace::new(mesh, patch, p)?;
    let flux = PatchFluxSpace::new(mesh, patch, p)?;
    EigenAssembly::new(&conforming, &flux)?.lambda(GenEigOptions::default())
}

/// `ρ_a` and `λ_a` for every vertex, in vertex order.
pub fn patch_constants(mesh: &Mesh, p: usize) -> Result<Vec<PatchConstants>> {
    exec::try_map_indexed(mesh.n_vertices(), |a| {
        let patch = mesh.vertex_patch(a);
        let (lambda, diagnostics) = lambda_a(mesh, &patch, p)?;
        Ok(PatchConstants { vertex: a, is_boundary: patch.is_boundary, rho: rho_a(mesh, &patch), lambda, diagnostics })
    })
}

/// Per-vertex `ρ_a`, `λ_a` with `c_K = max_{a ∈ V_K} ρ_a λ_a` and
/// `c_Ω = max_a ρ_a λ_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedConstants {
    pub rho: Vec<f64>,
    pub lambda: Vec<f64>,
    pub boundary: Vec<bool>,
    pub c_k: Vec<f64>,
    pub c_omega: f64,
}

impl CertifiedConstants {
    pub fn rho_lambda(&self, a: usize) -> f64 {
        self.rho[a] * self.lambda[a]
    }

    /// One row per vertex: `vertex,boundary,rho,lambda,rho_lambda`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,boundary,rho,lambda,rho_lambda\n");
        for a in 0..self.rho.len() {
            let _ = writeln!(
                out,
                "{a},{},{:.16e},{:.16e},{:.16e}",
                u8::from(self.boundary[a]),
                self.rho[a],
                self.lambda[a],
                self.rho_lambda(a)
            );
        }
        out
    }
}

pub fn aggregate(mesh: &Mesh, rho: &[f64], lambda: &[f64]) -> Result<CertifiedConstants> {
    if rho.len() != mesh.n_vertices() || lambda.len() != mesh.n_vertices() {
        return Err(Error::Dimension("one rho and one lambda per vertex expected".into()));
    }
    let rl: Vec<f64> = rho.iter().zip(lambda).map(|(r, l)| r * l).collect();
    let c_k: Vec<f64> = mesh.triangles().iter().map(|tri| tri.iter().map(|&a| rl[a]).fold(0.0, f64::max)).collect();
    let c_omega = rl.iter().copied().fold(0.0, f64::max);
    Ok(CertifiedConstants {
        rho: rho.to_vec(),
        lambda: lambda.to_vec(),
        boundary: mesh.boundary_vertex_flags().to_vec(),
        c_k,
        c_omega,
    })
}

/// All constants of `mesh` at degree `p`.
pub fn certified_constants(mesh: &Mesh, p: usize) -> Result<CertifiedConstants> {
    let per = patch_constants(mesh, p)?;
    let rho: Vec<f64> = per.iter().map(|c| c.rho).collect();
    let lambda: Vec<f64> = per.iter().map(|c| c.lambda).collect();
    aggregate(mesh, &rho, &lambda)
}

/// `sqrt((s+1)!) (h/π)^s`, the factor in
/// `‖∇(v − π_K^p v)‖_K ≤ sqrt((s+1)!) (h_K/π)^s |v|_{H^{1+s}(K)}`, `0 ≤ s ≤ p`.
pub fn local_best_factor(s: usize, p: usize, h: f64) -> Result<f64> {
    if s > p {
        return Err(Error::InvalidArgument(format!("regularity index {s} exceeds the degree {p}")));
    }
    let fact: f64 = (1..=s + 1).map(|k| k as f64).product();
    Ok(fact.sqrt() * (h / PI).powi(s as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_crisscross, Domain};

    #[test]
    fn rho_at_cell_center() {
        let mesh = build_crisscross(1, Domain::UnitSquare).unwrap();
        let rho = rho_a(&mesh, &mesh.vertex_patch(4));
        assert!((rho - (1.0 + 2.0 / PI)).abs() < 1e-14);
    }

    #[test]
    fn factor_values() {
        assert_eq!(local_best_factor(0, 1, 0.3).unwrap(), 1.0);
        assert!((local_best_factor(1, 1, 0.3).unwrap() - 2f64.sqrt() * 0.3 / PI).abs() < 1e-15);
        assert!((local_best_factor(2, 2, 0.3).unwrap() - 6f64.sqrt() * (0.3 / PI).powi(2)).abs() < 1e-15);
        assert!(local_best_factor(2, 1, 0.3).is_err());
    }

    #[test]
    fn lambda_finite_on_crisscross() {
        let mesh = build_crisscross(2, Domain::Square2).unwrap();
        let c = certified_constants(&mesh, 1).unwrap();
        assert!(c.lambda.iter().all(|l| l.is_finite() && *l > 0.0));
        let c_max = c.c_k.iter().copied().fold(0.0, f64::max);
        assert_eq!(c_max, c.c_omega);
        assert!(c.rho.iter().all(|r| *r >= 1.0 + 1.0 / PI - 1e-14));
    }
}
