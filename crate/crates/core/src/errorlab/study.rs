use super::{
    eta_h1, eta_l2, h1_error, h1_error_local_best, l2_error, local_bounds, BenchmarkCase, ErrorBreakdown,
    FieldFunction, MeshFamily,
};
use crate::constants::{certified_constants, CertifiedConstants};
use crate::mesh::{
    build_crisscross, mark_longest_edges, refine_graded, refine_uniform, CornerGrading, Domain, Mesh,
    DEFAULT_ELEMENT_CAP,
};
use crate::quasinterp::{global_best, nodal_interpolant, quasi_interpolate_broken, ConformingSpace};
use crate::reconstruct::local_best_with;
use crate::{Error, Result};

/// Settings shared by every level of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct StudyOptions {
    pub degree: usize,
    pub levels: usize,
    /// Quadrature exactness for the projection data, the global-best load
    /// and all error integrals.
    pub exactness: usize,
    pub cg_tol: f64,
    pub grading_const: f64,
    pub element_cap: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { degree: 1, levels: 4, exactness: 12, cg_tol: 1e-10, grading_const: 1.0, element_cap: DEFAULT_ELEMENT_CAP }
    }
}

/// Where the level meshes come from.
#[derive(Clone, Debug)]
pub enum MeshSource {
    /// The mesh family of the benchmark case.
    Builtin,
    /// A user mesh, bisected uniformly twice per level after marking its
    /// longest edges.
    Given(Mesh),
}

/// Mesh of level `level` (counting from 0).
pub fn level_mesh(case: &BenchmarkCase, source: &MeshSource, level: usize, opts: &StudyOptions) -> Result<Mesh> {
    match source {
        MeshSource::Given(mesh) => {
            let mut m = mark_longest_edges(mesh)?;
            for _ in 0..2 * level {
                m = refine_uniform(&m)?;
                if m.n_triangles() > opts.element_cap {
                    return Err(Error::RefinementBudget { elements: m.n_triangles(), cap: opts.element_cap });
                }
            }
            Ok(m)
        }
        MeshSource::Builtin => match case.family {
            MeshFamily::Uniform => build_crisscross(4 << level, case.domain),
            MeshFamily::Graded => {
                let coarse = build_crisscross(2, Domain::LShape)?;
                let rule = CornerGrading { h_max: 0.5 / (1u64 << level) as f64, c_g: opts.grading_const };
                refine_graded(&coarse, &rule, opts.element_cap)
            }
        },
    }
}

/// One value per approximation: local best, global best, quasi-interpolant
/// and Lagrange interpolant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Approximants {
    pub lb: f64,
    pub gb: f64,
    pub qi: f64,
    pub li: f64,
}

/// Errors, estimators and audits on one mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub n_dofs: usize,
    pub n_elements: usize,
    pub h_max: f64,
    pub h1: Approximants,
    pub l2: Approximants,
    pub eta_h1: f64,
    pub eta_l2: f64,
    pub c_omega: f64,
    /// Largest `error / bound` over elements for the elementwise bounds.
    pub local_h1_ratio: f64,
    pub local_l2_ratio: f64,
    pub cg_iterations: usize,
}

impl ErrorReport {
    pub fn effectivity_h1(&self) -> f64 {
        self.eta_h1 / self.h1.qi
    }

    pub fn effectivity_l2(&self) -> f64 {
        self.eta_l2 / self.l2.qi
    }

    /// Both global bounds hold with absolute slack `slack`.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.h1.qi <= self.eta_h1 + slack && self.l2.qi <= self.eta_l2 + slack
    }

    /// `LB ≤ GB ≤ QI` in the `H¹` seminorm with absolute slack `slack`.
    pub fn ordering_holds(&self, slack: f64) -> bool {
        self.h1.lb <= self.h1.gb + slack && self.h1.gb <= self.h1.qi + slack
    }
}

/// Computes all four approximations of `u` on `mesh` and their errors,
/// with constants computed beforehand.
pub fn evaluate_level(
    u: &FieldFunction,
    mesh: &Mesh,
    constants: &CertifiedConstants,
    opts: &StudyOptions,
) -> Result<ErrorReport> {
    let p = opts.degree;
    let q = opts.exactness;
    let space = ConformingSpace::new(mesh, p)?;
    let pi = local_best_with(u, mesh, p, q)?;
    let qi = space.to_broken(&quasi_interpolate_broken(mesh, &space, &pi)?)?;
    let (gb, cg) = global_best(u, mesh, &space, q, opts.cg_tol)?;
    let gb = space.to_broken(&gb)?;
    let li = space.to_broken(&nodal_interpolant(u, &space))?;

    let lb_h1 = h1_error_local_best(u, mesh, &pi, q)?;
    let qi_h1 = h1_error(u, mesh, &qi, q)?;
    let qi_l2 = l2_error(u, mesh, &qi, q)?;
    let h1 = Approximants {
        lb: lb_h1.total(),
        gb: h1_error(u, mesh, &gb, q)?.total(),
        qi: qi_h1.total(),
        li: h1_error(u, mesh, &li, q)?.total(),
    };
    let l2 = Approximants {
        lb: l2_error(u, mesh, &pi, q)?.total(),
        gb: l2_error(u, mesh, &gb, q)?.total(),
        qi: qi_l2.total(),
        li: l2_error(u, mesh, &li, q)?.total(),
    };
    let (local_h1_ratio, local_l2_ratio) = local_audit(mesh, constants, &lb_h1, &qi_h1, &qi_l2);
    Ok(ErrorReport {
        n_dofs: space.n_dofs(),
        n_elements: mesh.n_triangles(),
        h_max: mesh.max_diameter(),
        h1,
        l2,
        eta_h1: eta_h1(constants.c_omega, &lb_h1),
        eta_l2: eta_l2(mesh, constants.c_omega, &lb_h1),
        c_omega: constants.c_omega,
        local_h1_ratio,
        local_l2_ratio,
        cg_iterations: cg.iterations,
    })
}

fn local_audit(
    mesh: &Mesh,
    constants: &CertifiedConstants,
    lb_h1: &ErrorBreakdown,
    qi_h1: &ErrorBreakdown,
    qi_l2: &ErrorBreakdown,
) -> (f64, f64) {
    let ratio = |e: f64, b: f64| if b > 0.0 { e / b } else if e > 0.0 { f64::INFINITY } else { 0.0 };
    local_bounds(mesh, constants, lb_h1).iter().enumerate().fold((0.0f64, 0.0f64), |(r1, r2), (t, b)| {
        (r1.max(ratio(qi_h1.element(t), b.h1)), r2.max(ratio(qi_l2.element(t), b.l2)))
    })
}

/// Least-squares slope of `log e` against `log n`.
pub fn fit_slope(n: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let k = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / k, y.iter().sum::<f64>() / k);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Number of trailing levels used for the slope fit.
pub fn slope_window(levels: usize) -> usize {
    3.max(levels.saturating_sub(1)).min(levels)
}

/// Slopes of the quasi-interpolation errors over the trailing window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slopes {
    pub h1: f64,
    pub l2: f64,
}

#[derive(Clone, Debug)]
pub struct Study {
    pub case: String,
    pub options: StudyOptions,
    pub rows: Vec<ErrorReport>,
    pub meshes: Vec<Mesh>,
    pub constants: Vec<CertifiedConstants>,
}

impl Study {
    pub fn slopes(&self) -> Slopes {
        let w = slope_window(self.rows.len());
        let tail = &self.rows[self.rows.len() - w..];
        let n: Vec<f64> = tail.iter().map(|r| r.n_dofs as f64).collect();
        let h1: Vec<f64> = tail.iter().map(|r| r.h1.qi).collect();
        let l2: Vec<f64> = tail.iter().map(|r| r.l2.qi).collect();
        Slopes { h1: fit_slope(&n, &h1), l2: fit_slope(&n, &l2) }
    }

    /// Reevaluates every level at another quadrature exactness, reusing the
    /// meshes and constants.
    pub fn reevaluate(&self, u: &FieldFunction, exactness: usize) -> Result<Vec<ErrorReport>> {
        let opts = StudyOptions { exactness, ..self.options };
        self.meshes.iter().zip(&self.constants).map(|(m, c)| evaluate_level(u, m, c, &opts)).collect()
    }
}

/// Runs `opts.levels` levels of `case`.
pub fn convergence_study(case: &BenchmarkCase, source: &MeshSource, opts: &StudyOptions) -> Result<Study> {
    if opts.levels < 2 {
        return Err(Error::InvalidArgument("a convergence study needs at least 2 levels".into()));
    }
    let mut study =
        Study { case: case.name.to_string(), options: *opts, rows: Vec::new(), meshes: Vec::new(), constants: Vec::new() };
    for level in 0..opts.levels {
        let mesh = level_mesh(case, source, level, opts)?;
        let constants = certified_constants(&mesh, opts.degree)?;
        study.rows.push(evaluate_level(&case.function, &mesh, &constants, opts)?);
        study.meshes.push(mesh);
        study.constants.push(constants);
    }
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let n = [10.0, 40.0, 160.0];
        let e: Vec<f64> = n.iter().map(|v: &f64| 3.0 * v.powf(-0.75)).collect();
        assert!((fit_slope(&n, &e) + 0.75).abs() < 1e-12);
    }

    #[test]
    fn window_sizes() {
        assert_eq!(slope_window(2), 2);
        assert_eq!(slope_window(3), 3);
        assert_eq!(slope_window(4), 3);
        assert_eq!(slope_window(6), 5);
    }
}
