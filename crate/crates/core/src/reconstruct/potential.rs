use super::{affine_map, element_stiffness, LagrangeDofMap};
use crate::basis::{lagrange_reduce, p_basis, AffineMap};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::mesh::{Mesh, VertexPatch};
use crate::{Error, Result};

/// `P_p(T_a) ∩ H¹₀(ω_a)` on one vertex patch, with its assembled stiffness
/// matrix factorized once.
///
/// Broken data on the patch are passed as concatenated element blocks in the
/// order of `patch.elements`.
#[derive(Clone, Debug)]
pub struct PatchConformingSpace {
    center: usize,
    degree: usize,
    dofs: LagrangeDofMap,
    maps: Vec<AffineMap>,
    center_local: Vec<usize>,
    element_stiffness: Vec<DenseMatrix>,
    stiffness: DenseMatrix,
    factor: Cholesky,
    /// Nodal values at the `P_{p+1}` lattice from `P_p` nodal values.
    lift: DenseMatrix,
}

impl PatchConformingSpace {
    pub fn new(mesh: &Mesh, patch: &VertexPatch, p: usize) -> Result<Self> {
        let dofs = LagrangeDofMap::new(mesh, p, &patch.elements)?;
        let n_local = dofs.n_local();
        let mut maps = Vec::with_capacity(patch.elements.len());
        let mut center_local = Vec::with_capacity(patch.elements.len());
        let mut element_k = Vec::with_capacity(patch.elements.len());
        let mut stiffness = DenseMatrix::zeros(dofs.n_dofs(), dofs.n_dofs());
        for (k, &t) in patch.elements.iter().enumerate() {
            let map = affine_map(mesh, t)?;
            let ke = element_stiffness(&map, p)?;
            let ld = dofs.element_dofs(k);
            for i in 0..n_local {
                let Some(gi) = ld[i] else { continue };
                for j in 0..n_local {
                    if let Some(gj) = ld[j] {
                        stiffness[(gi, gj)] += ke[(i, j)];
                    }
                }
            }
            maps.push(map);
            center_local.push(patch.center_local_index(mesh, t));
            element_k.push(ke);
        }
        stiffness.symmetrize();
        let factor = Cholesky::new(&stiffness)?;
        let lift = p_basis(p)?.transfer_to(p_basis(p + 1)?);
        Ok(Self {
            center: patch.center,
            degree: p,
            dofs,
            maps,
            center_local,
            element_stiffness: element_k,
            stiffness,
            factor,
            lift,
        })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dofs(&self) -> &LagrangeDofMap {
        &self.dofs
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn n_elements(&self) -> usize {
        self.maps.len()
    }

    /// Length of a broken `P_p(T_a)` coefficient vector.
    pub fn n_broken(&self) -> usize {
        self.n_elements() * self.dofs.n_local()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    /// Local index of the patch center in each patch element.
    pub fn center_local(&self) -> &[usize] {
        &self.center_local
    }

    pub fn element_stiffness(&self, k: usize) -> &DenseMatrix {
        &self.element_stiffness[k]
    }

    /// Assembled stiffness on the patch dofs.
    pub fn stiffness(&self) -> &DenseMatrix {
        &self.stiffness
    }

    /// Block-diagonal broken stiffness on `P_p(T_a)`.
    pub fn broken_stiffness(&self) -> DenseMatrix {
        let n = self.dofs.n_local();
        let mut k = DenseMatrix::zeros(self.n_broken(), self.n_broken());
        for (e, ke) in self.element_stiffness.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    k[(e * n + i, e * n + j)] = ke[(i, j)];
                }
            }
        }
        k
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n_broken() {
            return Err(Error::Dimension(format!("patch data has {} values, expected {}", v.len(), self.n_broken())));
        }
        Ok(())
    }

    /// Elementwise `I_h^p(ψ_a u_h)`: the product is formed on the
    /// `P_{p+1}` lattice and reduced to degree `p`.
    pub fn hat_weighted(&self, u_h: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u_h)?;
        let n = self.dofs.n_local();
        let hi = p_basis(self.degree + 1)?;
        let mut out = Vec::with_capacity(u_h.len());
        for (k, &ia) in self.center_local.iter().enumerate() {
            let mut prod = self.lift.matvec(&u_h[k * n..(k + 1) * n]);
            for (j, v) in prod.iter_mut().enumerate() {
                *v *= hi.node_barycentric(j)[ia];
            }
            out.extend(lagrange_reduce(self.degree, &prod)?);
        }
        Ok(out)
    }

    /// The `s` in the patch space minimizing `‖∇_h(g − s)‖_{ω_a}` for broken data `g`.
    pub fn best_approximation(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g)?;
        let n = self.dofs.n_local();
        let mut rhs = vec![0.0; self.n_dofs()];
        for (k, ke) in self.element_stiffness.iter().enumerate() {
            let kg = ke.matvec(&g[k * n..(k + 1) * n]);
            for (d, v) in self.dofs.element_dofs(k).iter().zip(kg) {
                if let Some(d) = d {
                    rhs[*d] += v;
                }
            }
        }
        Ok(self.factor.solve(&rhs))
    }

    /// Element blocks of the patch-space field with coefficients `s`.
    pub fn expand(&self, s: &[f64]) -> Vec<f64> {
        self.dofs.expand(s)
    }

    /// `‖∇_h v‖²_{ω_a}` of broken patch data.
    pub fn broken_energy(&self, v: &[f64]) -> f64 {
        let n = self.dofs.n_local();
        self.element_stiffness.iter().enumerate().map(|(k, ke)| ke.quadratic_form(&v[k * n..(k + 1) * n])).sum()
    }

    /// `I_h^p(ψ_a u_h) − s_h^a(u_h)` as element blocks, together with `s`.
    pub fn defect(&self, u_h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let g = self.hat_weighted(u_h)?;
        let s = self.best_approximation(&g)?;
        let d = g.iter().zip(self.expand(&s)).map(|(a, b)| a - b).collect();
        Ok((d, s))
    }
}

/// `s_h^a(u_h)`: patch-space coefficients of the potential reconstruction.
pub fn potential_reconstruction(space: &PatchConformingSpace, u_h: &[f64]) -> Result<Vec<f64>> {
    space.best_approximation(&space.hat_weighted(u_h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_crisscross, Domain};

    #[test]
    fn conforming_datum_is_reproduced() {
        let mesh = build_crisscross(2, Domain::Square2).unwrap();
        let a = (0..mesh.n_vertices()).find(|&v| mesh.vertex(v) == [0.0, 0.0]).unwrap();
        let patch = mesh.vertex_patch(a);
        let space = PatchConformingSpace::new(&mesh, &patch, 1).unwrap();
        let ones = vec![1.0; space.n_broken()];
        let (d, s) = space.defect(&ones).unwrap();
        assert!(space.broken_energy(&d) < 1e-24);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 1.0).abs() < 1e-12);
    }
}
