//! Quasi-interpolation of `H¹₀` functions into conforming Lagrange finite
//! elements on triangle meshes, together with fully computable error
//! certificates.
//!
//! The operator is built from three local solves: an elementwise
//! `H¹`-orthogonal projection ([`reconstruct::local_best`]), a patchwise
//! conforming potential reconstruction and a patchwise divergence-free
//! Raviart–Thomas flux reconstruction. The ratio of the two patch problems is
//! bounded by a constant `λ_a` obtained from a small generalized eigenvalue
//! problem ([`constants`]), which in turn yields guaranteed `H¹` and `L²` error
//! bounds ([`errorlab`]).

pub mod basis;
pub mod constants;
pub mod error;
pub mod errorlab;
pub mod exec;
pub mod linalg;
pub mod mesh;
pub mod quasinterp;
pub mod reconstruct;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Highest polynomial degree `p` supported by the operator.
pub const MAX_DEGREE: usize = 3;
