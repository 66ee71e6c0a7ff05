use crate::basis::{p_basis, quad_rule};
use crate::mesh::Mesh;
use crate::reconstruct::{affine_map, element_stiffness, BrokenField};
use crate::{exec, Result};

use super::FieldFunction;

/// Squared elementwise contributions of an error norm.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBreakdown {
    pub per_element: Vec<f64>,
}

impl ErrorBreakdown {
    pub fn total(&self) -> f64 {
        self.per_element.iter().sum::<f64>().sqrt()
    }

    pub fn element(&self, t: usize) -> f64 {
        self.per_element[t].sqrt()
    }

    /// `‖·‖²_{ω_a}` for every vertex `a`.
    pub fn patch_sums(&self, mesh: &Mesh) -> Vec<f64> {
        let mut out = vec![0.0; mesh.n_vertices()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            for &a in tri {
                out[a] += self.per_element[t];
            }
        }
        out
    }
}

fn per_element(
    mesh: &Mesh,
    v: &BrokenField,
    exactness: usize,
    f: impl Fn(crate::Point, f64, [f64; 2]) -> f64 + Sync + Send,
) -> Result<ErrorBreakdown> {
    let basis = p_basis(v.degree())?;
    let rule = quad_rule(exactness)?;
    let tab = basis.tabulate(rule);
    let per_element = exec::try_map_indexed(mesh.n_triangles(), |t| -> Result<f64> {
        let map = affine_map(mesh, t)?;
        let c = v.block(t);
        let mut acc = 0.0;
        for q in 0..rule.len() {
            let val: f64 = c.iter().zip(tab.values(q)).map(|(c, b)| c * b).sum();
            let mut g = [0.0; 2];
            for (c, r) in c.iter().zip(tab.grads(q)) {
                let r = map.push_gradient(*r);
                g[0] += c * r[0];
                g[1] += c * r[1];
            }
            acc += rule.weights[q] * map.abs_det() * f(map.map(rule.xi(q)), val, g);
        }
        Ok(acc)
    })?;
    Ok(ErrorBreakdown { per_element })
}

/// `‖∇_h(u − v)‖_K²` per element.
pub fn h1_error(u: &FieldFunction, mesh: &Mesh, v: &BrokenField, exactness: usize) -> Result<ErrorBreakdown> {
    per_element(mesh, v, exactness, |x, _, g| {
        let gu = u.gradient(x);
        (gu[0] - g[0]).powi(2) + (gu[1] - g[1]).powi(2)
    })
}

/// `‖u − v‖_K²` per element.
pub fn l2_error(u: &FieldFunction, mesh: &Mesh, v: &BrokenField, exactness: usize) -> Result<ErrorBreakdown> {
    per_element(mesh, v, exactness, |x, val, _| (u.value(x) - val).powi(2))
}

/// `‖∇(u − π u)‖_K²` for the local-best projection `π u`, as
/// `‖∇u‖_K² − ‖∇π u‖_K²` with negative round-off clamped to zero. Exact
/// when `π u` was computed with the same quadrature.
pub fn h1_error_local_best(u: &FieldFunction, mesh: &Mesh, pi: &BrokenField, exactness: usize) -> Result<ErrorBreakdown> {
    let grad_u = per_element(mesh, pi, exactness, |x, _, _| {
        let g = u.gradient(x);
        g[0] * g[0] + g[1] * g[1]
    })?;
    let p = pi.degree();
    let per_element = exec::try_map_indexed(mesh.n_triangles(), |t| -> Result<f64> {
        let k = element_stiffness(&affine_map(mesh, t)?, p)?;
        Ok((grad_u.per_element[t] - k.quadratic_form(pi.block(t))).max(0.0))
    })?;
    Ok(ErrorBreakdown { per_element })
}

/// `|u|_{H²(K)}` with each second derivative multi-index counted once, or
/// `None` without a Hessian.
pub fn h2_seminorm(u: &FieldFunction, mesh: &Mesh, t: usize, exactness: usize) -> Result<Option<f64>> {
    if !u.has_hessian() {
        return Ok(None);
    }
    let rule = quad_rule(exactness)?;
    let map = affine_map(mesh, t)?;
    let mut acc = 0.0;
    for q in 0..rule.len() {
        let h = u.hessian(map.map(rule.xi(q))).expect("checked above");
        acc += rule.weights[q] * map.abs_det() * (h[0][0].powi(2) + h[0][1].powi(2) + h[1][1].powi(2));
    }
    Ok(Some(acc.sqrt()))
}
