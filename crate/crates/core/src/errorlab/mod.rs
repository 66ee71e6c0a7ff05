//! Benchmark target functions, error norms, the guaranteed estimators and
//! convergence studies.

mod estimators;
mod function;
mod library;
mod norms;
mod study;

pub use estimators::{eta_h1, eta_l2, local_bounds, patch_diameters, LocalBound};
pub use function::FieldFunction;
pub use library::{benchmark_case, benchmark_library, circle, lshape, lshape_angle, smooth, BenchmarkCase, MeshFamily};
pub use norms::{h1_error, h1_error_local_best, h2_seminorm, l2_error, ErrorBreakdown};
pub use study::{
    convergence_study, evaluate_level, fit_slope, level_mesh, slope_window, Approximants, ErrorReport, MeshSource,
    Slopes, Study, StudyOptions,
};
