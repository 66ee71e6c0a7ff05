//! The local solves behind the operator: the elementwise `H¹` projection,
//! and on each vertex patch the conforming potential reconstruction and the
//! divergence-free Raviart–Thomas flux reconstruction.
//!
//! Element data are stored as nodal values on the principal lattice of the
//! element, in the local vertex order of the mesh triangle.

mod dofmap;
mod element;
mod flux;
mod potential;

pub use dofmap::LagrangeDofMap;
pub use element::{element_mass, element_moments, element_stiffness};
pub use flux::{flux_reconstruction, FluxField, PatchFluxSpace};
pub use potential::{potential_reconstruction, PatchConformingSpace};

pub(crate) use element::affine_map;

use crate::basis::{p_basis, quad_rule};
use crate::errorlab::FieldFunction;
use crate::linalg::{DenseMatrix, Lu};
use crate::mesh::Mesh;
use crate::{exec, Error, Point, Result};

/// Piecewise `P_p` data, possibly discontinuous across edges.
#[derive(Clone, Debug, PartialEq)]
pub struct BrokenField {
    degree: usize,
    n_local: usize,
    coeffs: Vec<f64>,
}

impl BrokenField {
    pub fn zeros(mesh: &Mesh, p: usize) -> Result<Self> {
        let n_local = p_basis(p)?.dim();
        Ok(Self { degree: p, n_local, coeffs: vec![0.0; n_local * mesh.n_triangles()] })
    }

    /// Wraps concatenated element blocks of nodal values.
    pub fn from_blocks(p: usize, coeffs: Vec<f64>) -> Result<Self> {
        let n_local = p_basis(p)?.dim();
        if !coeffs.len().is_multiple_of(n_local) {
            return Err(Error::Dimension(format!("{} values do not split into P_{p} blocks", coeffs.len())));
        }
        Ok(Self { degree: p, n_local, coeffs })
    }

    /// Elementwise nodal interpolation of `f`.
    pub fn interpolate(mesh: &Mesh, p: usize, f: impl Fn(Point) -> f64) -> Result<Self> {
        let basis = p_basis(p)?;
        let mut coeffs = Vec::with_capacity(basis.dim() * mesh.n_triangles());
        for t in 0..mesh.n_triangles() {
            let map = affine_map(mesh, t)?;
            coeffs.extend((0..basis.dim()).map(|j| f(map.map(basis.node_xi(j)))));
        }
        Ok(Self { degree: p, n_local: basis.dim(), coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_elements(&self) -> usize {
        self.coeffs.len() / self.n_local
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn block(&self, t: usize) -> &[f64] {
        &self.coeffs[t * self.n_local..(t + 1) * self.n_local]
    }

    pub fn block_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.coeffs[t * self.n_local..(t + 1) * self.n_local]
    }

    /// Value on element `t` at reference point `xi`.
    pub fn eval(&self, t: usize, xi: [f64; 2]) -> f64 {
        p_basis(self.degree).expect("degree validated at construction").eval_field(self.block(t), xi)
    }

    /// Concatenated blocks of the listed elements.
    pub fn restrict(&self, elements: &[usize]) -> Vec<f64> {
        elements.iter().flat_map(|&t| self.block(t).iter().copied()).collect()
    }
}

/// Default quadrature exactness for the data of [`local_best`].
pub fn default_local_best_exactness(p: usize) -> usize {
    2 * p + 8
}

/// Elementwise `H¹` projection with preserved mean, at the default quadrature.
pub fn local_best(u: &FieldFunction, mesh: &Mesh, p: usize) -> Result<BrokenField> {
    local_best_with(u, mesh, p, default_local_best_exactness(p))
}

/// On each element `K`, the `q ∈ P_p(K)` with `(∇q, ∇v)_K = (∇u, ∇v)_K` for
/// all `v ∈ P_p(K)` and `(q, 1)_K = (u, 1)_K`, from the bordered system
///
/// ```text
/// [ K  m ] [q]   [(∇u, ∇φ)]
/// [ mᵀ 0 ] [μ] = [ (u, 1) ]
/// ```
pub fn local_best_with(u: &FieldFunction, mesh: &Mesh, p: usize, exactness: usize) -> Result<BrokenField> {
    let basis = p_basis(p)?;
    let rule = quad_rule(exactness)?;
    let n = basis.dim();
    let tab = basis.tabulate(rule);
    let blocks = exec::try_map_indexed(mesh.n_triangles(), |t| -> Result<Vec<f64>> {
        let map = affine_map(mesh, t)?;
        let k = element_stiffness(&map, p)?;
        let m = element_moments(&map, p)?;
        let mut a = DenseMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = k[(i, j)];
            }
            a[(i, n)] = m[i];
            a[(n, i)] = m[i];
        }
        let mut rhs = vec![0.0; n + 1];
        for q in 0..rule.len() {
            let w = rule.weights[q] * map.abs_det();
            let x = map.map(rule.xi(q));
            let gu = u.gradient(x);
            for (r, g) in rhs.iter_mut().zip(tab.grads(q)) {
                let g = map.push_gradient(*g);
                *r += w * (gu[0] * g[0] + gu[1] * g[1]);
            }
            rhs[n] += w * u.value(x);
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut sol = Lu::new(&a)?.solve(&rhs);
        sol.truncate(n);
        Ok(sol)
    })?;
    BrokenField::from_blocks(p, blocks.concat())
}
