//! Small dense factorizations, a Jacobi-preconditioned conjugate gradient
//! solver and a symmetric generalized eigensolver that deflates a shared
//! kernel. Patch problems are a few hundred unknowns at most, so everything
//! dense here is plain `O(n³)` code.

mod dense;
mod eigen;
mod sparse;

pub use dense::{cholesky_solve, lu_solve, Cholesky, DenseMatrix, Lu};
pub use eigen::{gen_eig_max, sym_eigen, GenEigDiagnostics, GenEigOptions, SymEigen};
pub use sparse::{cg_solve, cg_solve_capped, CgReport, SparseMatrix, TripletBuilder};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
