//! The quasi-interpolation operator on the conforming space with zero
//! boundary trace, and the two approximations it is compared with: the
//! global `H¹` best approximation and the nodal Lagrange interpolant.

use std::fmt::Write as _;

use crate::basis::{p_basis, quad_rule};
use crate::errorlab::FieldFunction;
use crate::linalg::{cg_solve, CgReport, TripletBuilder};
use crate::mesh::Mesh;
use crate::reconstruct::{
    affine_map, element_stiffness, local_best_with, potential_reconstruction, BrokenField, LagrangeDofMap,
    PatchConformingSpace,
};
use crate::{exec, Error, Point, Result};

/// `P_p(T_h) ∩ H¹₀(Ω)`: shared Lagrange nodes identified, boundary nodes removed.
#[derive(Clone, Debug)]
pub struct ConformingSpace {
    dofs: LagrangeDofMap,
}

/// Coefficients of a member of a [`ConformingSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConformingField {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl ConformingSpace {
    pub fn new(mesh: &Mesh, p: usize) -> Result<Self> {
        let all: Vec<usize> = (0..mesh.n_triangles()).collect();
        Ok(Self { dofs: LagrangeDofMap::new(mesh, p, &all)? })
    }

    pub fn degree(&self) -> usize {
        self.dofs.degree()
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn dofs(&self) -> &LagrangeDofMap {
        &self.dofs
    }

    /// Dofs of the local nodes of triangle `t`.
    pub fn element_dofs(&self, t: usize) -> &[Option<usize>] {
        self.dofs.element_dofs(t)
    }

    pub fn node_points(&self) -> &[Point] {
        self.dofs.points()
    }

    pub fn zero(&self) -> ConformingField {
        ConformingField { degree: self.degree(), coeffs: vec![0.0; self.n_dofs()] }
    }

    pub fn to_broken(&self, field: &ConformingField) -> Result<BrokenField> {
        if field.coeffs.len() != self.n_dofs() || field.degree != self.degree() {
            return Err(Error::Dimension("field does not belong to this space".into()));
        }
        BrokenField::from_blocks(self.degree(), self.dofs.expand(&field.coeffs))
    }

    /// Sparse stiffness matrix on the free dofs.
    pub fn stiffness(&self, mesh: &Mesh) -> Result<crate::linalg::SparseMatrix> {
        let p = self.degree();
        let mats = exec::try_map_indexed(mesh.n_triangles(), |t| element_stiffness(&affine_map(mesh, t)?, p))?;
        let mut tb = TripletBuilder::new(self.n_dofs(), self.n_dofs());
        for (t, ke) in mats.iter().enumerate() {
            let ld = self.element_dofs(t);
            for (i, di) in ld.iter().enumerate() {
                let Some(gi) = *di else { continue };
                for (j, dj) in ld.iter().enumerate() {
                    if let Some(gj) = *dj {
                        tb.push(gi, gj, ke[(i, j)]);
                    }
                }
            }
        }
        tb.build(true)
    }

    /// CSV with one row per free node: `node,x,y,value`.
    /// Nodal values as CSV with columns `node,x,y,boundary,value`. Free nodes
    /// come first in DOF order, followed by the Lagrange nodes on `∂Ω`, where
    /// every field of the space vanishes.
    pub fn field_csv(&self, mesh: &Mesh, field: &ConformingField) -> String {
        let mut out = String::from("node,x,y,boundary,value\n");
        for (i, (x, v)) in self.node_points().iter().zip(&field.coeffs).enumerate() {
            let _ = writeln!(out, "{i},{:.16e},{:.16e},0,{:.16e}", x[0], x[1], v);
        }
        let mut next = self.n_dofs();
        let mut row = |x: Point| {
            let _ = writeln!(out, "{next},{:.16e},{:.16e},1,{:.16e}", x[0], x[1], 0.0);
            next += 1;
        };
        for v in (0..mesh.n_vertices()).filter(|&v| mesh.is_boundary_vertex(v)) {
            row(mesh.vertex(v));
        }
        let p = self.degree();
        for e in mesh.edges().iter().filter(|e| e.is_boundary()) {
            let (a, b) = (mesh.vertex(e.vertices[0]), mesh.vertex(e.vertices[1]));
            for k in 1..p {
                let t = k as f64 / p as f64;
                row([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        out
    }
}

/// `J_h^p u = Σ_a s_h^a((π_h^p u)|_{ω_a})`, with data quadrature of the given exactness.
pub fn quasi_interpolate(u: &FieldFunction, mesh: &Mesh, space: &ConformingSpace, exactness: usize) -> Result<ConformingField> {
    let pi = local_best_with(u, mesh, space.degree(), exactness)?;
    quasi_interpolate_broken(mesh, space, &pi)
}

/// The operator applied to arbitrary broken `P_p` data.
///
/// Patch solves run through [`exec`]; the contributions are then added in
/// ascending vertex order.
pub fn quasi_interpolate_broken(mesh: &Mesh, space: &ConformingSpace, u_h: &BrokenField) -> Result<ConformingField> {
    let p = space.degree();
    if u_h.degree() != p || u_h.n_elements() != mesh.n_triangles() {
        return Err(Error::Dimension("broken data do not match the mesh and degree".into()));
    }
    let parts = exec::try_map_indexed(mesh.n_vertices(), |a| -> Result<Vec<(usize, f64)>> {
        let patch = mesh.vertex_patch(a);
        let local = PatchConformingSpace::new(mesh, &patch, p)?;
        let s = potential_reconstruction(&local, &u_h.restrict(&patch.elements))?;
        let mut to_global = vec![usize::MAX; s.len()];
        for (k, &t) in patch.elements.iter().enumerate() {
            for (dl, dg) in local.dofs().element_dofs(k).iter().zip(space.element_dofs(t)) {
                if let Some(dl) = dl {
                    to_global[*dl] = dg.ok_or_else(|| {
                        Error::InvalidMesh(format!("patch {a} has a dof on the domain boundary"))
                    })?;
                }
            }
        }
        Ok(to_global.into_iter().zip(s).collect())
    })?;
    let mut coeffs = vec![0.0; space.n_dofs()];
    for part in parts {
        for (g, v) in part {
            coeffs[g] += v;
        }
    }
    Ok(ConformingField { degree: p, coeffs })
}

/// Minimizer of `‖∇(u − v)‖_Ω` over the conforming space, by conjugate gradients.
pub fn global_best(
    u: &FieldFunction,
    mesh: &Mesh,
    space: &ConformingSpace,
    exactness: usize,
    rel_tol: f64,
) -> Result<(ConformingField, CgReport)> {
    let p = space.degree();
    let basis = p_basis(p)?;
    let rule = quad_rule(exactness)?;
    let tab = basis.tabulate(rule);
    let loads = exec::try_map_indexed(mesh.n_triangles(), |t| -> Result<Vec<f64>> {
        let map = affine_map(mesh, t)?;
        let mut f = vec![0.0; basis.dim()];
        for q in 0..rule.len() {
            let w = rule.weights[q] * map.abs_det();
            let gu = u.gradient(map.map(rule.xi(q)));
            for (fi, g) in f.iter_mut().zip(tab.grads(q)) {
                let g = map.push_gradient(*g);
                *fi += w * (gu[0] * g[0] + gu[1] * g[1]);
            }
        }
        Ok(f)
    })?;
    let mut b = vec![0.0; space.n_dofs()];
    for (t, f) in loads.iter().enumerate() {
        for (d, v) in space.element_dofs(t).iter().zip(f) {
            if let Some(d) = d {
                b[*d] += v;
            }
        }
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let a = space.stiffness(mesh)?;
    let (coeffs, report) = cg_solve(&a, &b, rel_tol)?;
    Ok((ConformingField { degree: p, coeffs }, report))
}

/// Values of `u` at the free nodes. Only meaningful for continuous `u`.
pub fn nodal_interpolant(u: &FieldFunction, space: &ConformingSpace) -> ConformingField {
    ConformingField { degree: space.degree(), coeffs: space.node_points().iter().map(|&x| u.value(x)).collect() }
}
