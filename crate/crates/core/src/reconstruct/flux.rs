use std::collections::HashMap;

use super::affine_map;
use crate::basis::{p_basis, quad_rule, rt_basis, AffineMap};
use crate::linalg::{DenseMatrix, Lu};
use crate::mesh::{Mesh, VertexPatch};
use crate::{Error, Result};

/// Reference gradients of the barycentric coordinates.
const HAT_REF_GRADIENTS: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// The mixed pair `X_h^a × Y_h^a` on one vertex patch: `RT_p` fields with
/// normal continuity across interior patch edges and free normal trace on
/// `∂ω_a`, and broken `P_p` multipliers.
///
/// Edge moments are taken against the canonical low-to-high orientation of
/// each mesh edge, so an element whose local edge runs the other way enters
/// moment `k` with sign `(−1)^{k+1}`.
#[derive(Clone, Debug)]
pub struct PatchFluxSpace {
    center: usize,
    degree: usize,
    maps: Vec<AffineMap>,
    center_local: Vec<usize>,
    /// `(X dof, sign)` of every local RT function, element-major.
    x_dofs: Vec<(usize, f64)>,
    n_x: usize,
    n_y: usize,
    mass: DenseMatrix,
    divergence: DenseMatrix,
    /// `F[i][j] = (∇_h(ψ_a φ_j), v_i)` for the broken `P_p` basis `φ_j`.
    load: DenseMatrix,
    saddle: Lu,
}

/// An element of `X_h^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxField {
    pub coeffs: Vec<f64>,
}

impl PatchFluxSpace {
    pub fn new(mesh: &Mesh, patch: &VertexPatch, p: usize) -> Result<Self> {
        let rt = rt_basis(p)?;
        let lag = p_basis(p)?;
        let (n_rt, n_lag) = (rt.dim(), lag.dim());
        let n_el = patch.elements.len();

        let mut edge_base: HashMap<usize, usize> = HashMap::new();
        let mut n_x = 0;
        let mut x_dofs = Vec::with_capacity(n_el * n_rt);
        for &t in &patch.elements {
            let tri = mesh.triangle(t);
            let edges = mesh.triangle_edges(t);
            for (e, &ge) in edges.iter().enumerate() {
                let base = *edge_base.entry(ge).or_insert_with(|| {
                    n_x += p + 1;
                    n_x - (p + 1)
                });
                let forward = tri[(e + 1) % 3] < tri[(e + 2) % 3];
                for k in 0..=p {
                    let sign = if forward || k % 2 == 1 { 1.0 } else { -1.0 };
                    x_dofs.push((base + k, sign));
                }
            }
            for _ in 0..rt.n_interior() {
                x_dofs.push((n_x, 1.0));
                n_x += 1;
            }
        }
        let n_y = n_el * n_lag;

        let rule = quad_rule(2 * p + 2)?;
        let rt_tab = rt.tabulate(rule);
        let lag_tab = lag.tabulate(rule);
        let mut maps = Vec::with_capacity(n_el);
        let mut center_local = Vec::with_capacity(n_el);
        let mut mass = DenseMatrix::zeros(n_x, n_x);
        let mut divergence = DenseMatrix::zeros(n_y, n_x);
        let mut load = DenseMatrix::zeros(n_x, n_y);
        let mut v = vec![[0.0; 2]; n_rt];
        let mut dv = vec![0.0; n_rt];
        let mut g = vec![[0.0; 2]; n_lag];
        for (k, &t) in patch.elements.iter().enumerate() {
            let map = affine_map(mesh, t)?;
            let ia = patch.center_local_index(mesh, t);
            let grad_psi = map.push_gradient(HAT_REF_GRADIENTS[ia]);
            let ld = &x_dofs[k * n_rt..(k + 1) * n_rt];
            for q in 0..rule.len() {
                let w = rule.weights[q] * map.abs_det();
                let xi = rule.xi(q);
                let psi = [1.0 - xi[0] - xi[1], xi[0], xi[1]][ia];
                for i in 0..n_rt {
                    let s = ld[i].1;
                    let pv = map.push_rt_value(rt_tab.values(q)[i]);
                    v[i] = [s * pv[0], s * pv[1]];
                    dv[i] = s * map.push_rt_div(rt_tab.divs(q)[i]);
                }
                let phi = lag_tab.values(q);
                for (gj, r) in g.iter_mut().zip(lag_tab.grads(q)) {
                    *gj = map.push_gradient(*r);
                }
                for i in 0..n_rt {
                    let gi = ld[i].0;
                    for j in 0..n_rt {
                        mass[(gi, ld[j].0)] += w * (v[i][0] * v[j][0] + v[i][1] * v[j][1]);
                    }
                    for l in 0..n_lag {
                        divergence[(k * n_lag + l, gi)] += w * phi[l] * dv[i];
                        // ∇(ψ_a φ_l) = φ_l ∇ψ_a + ψ_a ∇φ_l
                        let d = [phi[l] * grad_psi[0] + psi * g[l][0], phi[l] * grad_psi[1] + psi * g[l][1]];
                        load[(gi, k * n_lag + l)] += w * (d[0] * v[i][0] + d[1] * v[i][1]);
                    }
                }
            }
            maps.push(map);
            center_local.push(ia);
        }
        mass.symmetrize();

        let n = n_x + n_y;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n_x {
            for j in 0..n_x {
                a[(i, j)] = mass[(i, j)];
            }
        }
        for l in 0..n_y {
            for j in 0..n_x {
                a[(n_x + l, j)] = divergence[(l, j)];
                a[(j, n_x + l)] = divergence[(l, j)];
            }
        }
        let saddle = Lu::new(&a)?;
        Ok(Self { center: patch.center, degree: p, maps, center_local, x_dofs, n_x, n_y, mass, divergence, load, saddle })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// `(v_i, v_j)_{ω_a}` on `X_h^a`.
    pub fn mass(&self) -> &DenseMatrix {
        &self.mass
    }

    /// `(w_l, div v_j)`, rows indexed by the broken `P_p` basis of `Y_h^a`.
    pub fn divergence(&self) -> &DenseMatrix {
        &self.divergence
    }

    /// Linear map from broken `P_p(T_a)` data `u_h` to the load `(∇_h(ψ_a u_h), v_i)`.
    pub fn load(&self) -> &DenseMatrix {
        &self.load
    }

    /// `(X dof, sign)` of the local RT functions of patch element `k`.
    pub fn element_x_dofs(&self, k: usize) -> &[(usize, f64)] {
        let n = self.x_dofs.len() / self.maps.len();
        &self.x_dofs[k * n..(k + 1) * n]
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn center_local(&self) -> &[usize] {
        &self.center_local
    }

    /// Solves the saddle system for a given load, discarding the multiplier.
    pub fn solve_load(&self, f: &[f64]) -> Result<FluxField> {
        if f.len() != self.n_x {
            return Err(Error::Dimension(format!("flux load has {} entries, expected {}", f.len(), self.n_x)));
        }
        let mut rhs = f.to_vec();
        rhs.resize(self.n_x + self.n_y, 0.0);
        let mut sol = self.saddle.solve(&rhs);
        sol.truncate(self.n_x);
        Ok(FluxField { coeffs: sol })
    }

    /// Matrix of the linear map `u_h ↦ r_h^a(u_h)`.
    pub fn response_matrix(&self) -> DenseMatrix {
        let mut r = DenseMatrix::zeros(self.n_x, self.n_y);
        let mut rhs = vec![0.0; self.n_x + self.n_y];
        for j in 0..self.n_y {
            for i in 0..self.n_x {
                rhs[i] = self.load[(i, j)];
            }
            let sol = self.saddle.solve(&rhs);
            r.set_column(j, &sol[..self.n_x]);
        }
        r
    }

    /// Physical value at reference point `xi` of patch element `k`.
    pub fn eval(&self, flux: &FluxField, k: usize, xi: [f64; 2]) -> [f64; 2] {
        let rt = rt_basis(self.degree).expect("degree validated at construction");
        let map = &self.maps[k];
        let mut out = [0.0; 2];
        for ((d, s), v) in self.element_x_dofs(k).iter().zip(rt.eval(xi)) {
            let v = map.push_rt_value(v);
            out[0] += s * flux.coeffs[*d] * v[0];
            out[1] += s * flux.coeffs[*d] * v[1];
        }
        out
    }

    /// `‖div r‖_{L²(K)}` for every patch element.
    pub fn divergence_norms(&self, flux: &FluxField) -> Vec<f64> {
        let rt = rt_basis(self.degree).expect("degree validated at construction");
        let rule = quad_rule(2 * self.degree).expect("exactness 2p is available");
        (0..self.maps.len())
            .map(|k| {
                let map = &self.maps[k];
                let dofs = self.element_x_dofs(k);
                (0..rule.len())
                    .map(|q| {
                        let d: f64 = dofs
                            .iter()
                            .zip(rt.eval_div(rule.xi(q)))
                            .map(|((i, s), dv)| s * flux.coeffs[*i] * map.push_rt_div(dv))
                            .sum();
                        rule.weights[q] * map.abs_det() * d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

impl FluxField {
    /// `‖r‖_{ω_a}`.
    pub fn norm(&self, space: &PatchFluxSpace) -> f64 {
        space.mass.quadratic_form(&self.coeffs).max(0.0).sqrt()
    }
}

/// `r_h^a(u_h)` for broken patch data `u_h` (element blocks in patch order).
pub fn flux_reconstruction(space: &PatchFluxSpace, u_h: &[f64]) -> Result<FluxField> {
    if u_h.len() != space.n_y {
        return Err(Error::Dimension(format!("patch data has {} values, expected {}", u_h.len(), space.n_y)));
    }
    space.solve_load(&space.load.matvec(u_h))
}
