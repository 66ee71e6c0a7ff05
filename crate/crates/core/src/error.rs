use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("MEDIT parse error at line {line}: {msg}")]
    Medit { line: usize, msg: String },

    #[error("refinement budget exceeded: {elements} elements > cap {cap}")]
    RefinementBudget { elements: usize, cap: usize },

    #[error("unsupported polynomial degree {degree} (supported: {min}..={max})")]
    UnsupportedDegree { degree: usize, min: usize, max: usize },

    #[error("unsupported quadrature exactness {0} (max 20)")]
    UnsupportedQuadrature(usize),

    #[error("degenerate triangle {0}")]
    DegenerateElement(usize),

    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("matrix is numerically singular at pivot {0}")]
    Singular(usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("CG did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("generalized Rayleigh quotient is unbounded: ‖A v‖ = {residual:e} on a kernel direction of B")]
    QuotientUnbounded { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
