use std::f64::consts::PI;

use super::ErrorBreakdown;
use crate::constants::CertifiedConstants;
use crate::mesh::Mesh;

/// Space dimension.
const D: f64 = 2.0;

/// `(1 + (d+1)² c_Ω²)^{1/2} ‖∇_h(u − π u)‖_Ω`.
pub fn eta_h1(c_omega: f64, local_best: &ErrorBreakdown) -> f64 {
    (1.0 + (D + 1.0).powi(2) * c_omega * c_omega).sqrt() * local_best.total()
}

/// `(1/(π√(d+1)) + (2/d)√(d+1) c_Ω) (Σ_a h_a² ‖∇_h(u − π u)‖²_{ω_a})^{1/2}`.
pub fn eta_l2(mesh: &Mesh, c_omega: f64, local_best: &ErrorBreakdown) -> f64 {
    let h_a = patch_diameters(mesh);
    let sum: f64 = local_best.patch_sums(mesh).iter().zip(&h_a).map(|(e, h)| h * h * e).sum();
    let factor = 1.0 / (PI * (D + 1.0).sqrt()) + (2.0 / D) * (D + 1.0).sqrt() * c_omega;
    factor * sum.sqrt()
}

/// Largest element diameter of every vertex patch.
pub fn patch_diameters(mesh: &Mesh) -> Vec<f64> {
    let mut h_a = vec![0.0f64; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let h = mesh.element_geometry(t).h;
        for &a in tri {
            h_a[a] = h_a[a].max(h);
        }
    }
    h_a
}

/// Certified elementwise bounds on the quasi-interpolation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalBound {
    pub h1: f64,
    pub l2: f64,
}

/// For each element `K`, with `e_K = ‖∇(u − π u)‖_K` and `e_a` its patch sum:
/// `H¹`: `(e_K² + (Σ_{a∈V_K} ρ_a λ_a e_a)²)^{1/2}`;
/// `L²`: `(h_K/π) e_K + (2/d) Σ_{a∈V_K} ρ_a λ_a h_a e_a`.
pub fn local_bounds(mesh: &Mesh, constants: &CertifiedConstants, local_best: &ErrorBreakdown) -> Vec<LocalBound> {
    let e_a: Vec<f64> = local_best.patch_sums(mesh).into_iter().map(f64::sqrt).collect();
    let h_a = patch_diameters(mesh);
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let e_k = local_best.element(t);
            let s1: f64 = tri.iter().map(|&a| constants.rho_lambda(a) * e_a[a]).sum();
            let s2: f64 = tri.iter().map(|&a| constants.rho_lambda(a) * h_a[a] * e_a[a]).sum();
            LocalBound {
                h1: (e_k * e_k + s1 * s1).sqrt(),
                l2: mesh.element_geometry(t).h / PI * e_k + (2.0 / D) * s2,
            }
        })
        .collect()
}
