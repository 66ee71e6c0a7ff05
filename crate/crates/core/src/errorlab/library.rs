use std::f64::consts::PI;

use super::FieldFunction;
use crate::mesh::Domain;

/// `sin(πx) sin(πy)`.
pub fn smooth() -> FieldFunction {
    FieldFunction::new(
        "smooth",
        |x| (PI * x[0]).sin() * (PI * x[1]).sin(),
        |x| {
            let (sx, cx) = (PI * x[0]).sin_cos();
            let (sy, cy) = (PI * x[1]).sin_cos();
            [PI * cx * sy, PI * sx * cy]
        },
    )
    .with_hessian(|x| {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        let p2 = PI * PI;
        [[-p2 * sx * sy, p2 * cx * cy], [p2 * cx * cy, -p2 * sx * sy]]
    })
}

/// `(1 − |x|) 1_{|x|<1}`: a cone with a gradient jump across the unit circle.
pub fn circle() -> FieldFunction {
    FieldFunction::new(
        "circle",
        |x| (1.0 - x[0].hypot(x[1])).max(0.0),
        |x| {
            let r = x[0].hypot(x[1]);
            if r >= 1.0 || r == 0.0 {
                [0.0, 0.0]
            } else {
                [-x[0] / r, -x[1] / r]
            }
        },
    )
    .with_kinks(|x| {
        let r = x[0].hypot(x[1]);
        r.min((r - 1.0).abs())
    })
}

const ALPHA: f64 = 2.0 / 3.0;

/// Angle measured clockwise from the positive `x` axis, in `[0, 2π)`.
pub fn lshape_angle(x: [f64; 2]) -> f64 {
    (-x[1].atan2(x[0])).rem_euclid(2.0 * PI)
}

/// `χ(x) |x|^{2/3} sin(2θ/3)` with the cutoff `χ = (1 − |x|²) 1_{|x|<1}`.
pub fn lshape() -> FieldFunction {
    FieldFunction::new(
        "lshape",
        |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 >= 1.0 {
                return 0.0;
            }
            (1.0 - r2) * r2.sqrt().powf(ALPHA) * (ALPHA * lshape_angle(x)).sin()
        },
        |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 >= 1.0 || r2 == 0.0 {
                return [0.0, 0.0];
            }
            let r = r2.sqrt();
            let (s, c) = (ALPHA * lshape_angle(x)).sin_cos();
            let g = r.powf(ALPHA) * s;
            // ∇r = x/r, ∇θ = (y, −x)/r²
            let dr = ALPHA * r.powf(ALPHA - 1.0) * s;
            let dt = r.powf(ALPHA) * ALPHA * c;
            let grad_g = [dr * x[0] / r + dt * x[1] / r2, dr * x[1] / r - dt * x[0] / r2];
            let chi = 1.0 - r2;
            [chi * grad_g[0] - 2.0 * x[0] * g, chi * grad_g[1] - 2.0 * x[1] * g]
        },
    )
    .with_kinks(|x| {
        let r = x[0].hypot(x[1]);
        r.min((r - 1.0).abs())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    /// Criss-cross meshes with `4·2^l` squares per side at level `l`.
    Uniform,
    /// Corner-graded bisection of the coarse criss-cross L-shape mesh.
    Graded,
}

/// A target function, its domain, the mesh family and the expected decay
/// rates of the `H¹` and `L²` errors in terms of the number of dofs.
#[derive(Clone, Debug)]
pub struct BenchmarkCase {
    pub name: &'static str,
    pub domain: Domain,
    pub function: FieldFunction,
    pub family: MeshFamily,
    pub expected_h1_slope: f64,
    pub expected_l2_slope: f64,
    pub h1_slope_tol: f64,
    pub l2_slope_tol: f64,
}

pub fn benchmark_library() -> Vec<BenchmarkCase> {
    vec![
        BenchmarkCase {
            name: "smooth",
            domain: Domain::Square2,
            function: smooth(),
            family: MeshFamily::Uniform,
            expected_h1_slope: -0.5,
            expected_l2_slope: -1.0,
            h1_slope_tol: 0.05,
            l2_slope_tol: 0.07,
        },
        BenchmarkCase {
            name: "circle",
            domain: Domain::Square2,
            function: circle(),
            family: MeshFamily::Uniform,
            expected_h1_slope: -0.25,
            expected_l2_slope: -0.75,
            h1_slope_tol: 0.05,
            l2_slope_tol: 0.07,
        },
        BenchmarkCase {
            name: "lshape",
            domain: Domain::LShape,
            function: lshape(),
            family: MeshFamily::Uniform,
            expected_h1_slope: -1.0 / 3.0,
            expected_l2_slope: -5.0 / 6.0,
            h1_slope_tol: 0.05,
            l2_slope_tol: 0.07,
        },
        BenchmarkCase {
            name: "lshape_adapted",
            domain: Domain::LShape,
            function: lshape(),
            family: MeshFamily::Graded,
            expected_h1_slope: -0.5,
            expected_l2_slope: -1.0,
            h1_slope_tol: 0.07,
            l2_slope_tol: 0.1,
        },
    ]
}

pub fn benchmark_case(name: &str) -> Option<BenchmarkCase> {
    benchmark_library().into_iter().find(|c| c.name == name)
}
