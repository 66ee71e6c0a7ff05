use super::DenseMatrix;
use crate::{Error, Result};

/// Eigen-decomposition `A = V diag(values) Vᵀ` of a symmetric matrix, with
/// eigenvalues sorted in ascending order and eigenvectors stored as the
/// columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi rotations. Sweeps until the off-diagonal Frobenius norm is
/// below `1e-15` times the norm of the input.
pub fn sym_eigen(a: &DenseMatrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::Dimension("sym_eigen needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    const MAX_SWEEPS: usize = 100;
    let n = a.nrows();
    let mut m = a.clone();
    m.symmetrize();
    let mut v = DenseMatrix::identity(n);
    let total = m.frobenius_norm();
    let off = |m: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };
    for _ in 0..MAX_SWEEPS {
        if total == 0.0 || off(&m) <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(SymEigen { values, vectors })
}

#[derive(Clone, Copy, Debug)]
pub struct GenEigOptions {
    /// Eigenvalues of `B` below `kernel_rel_tol · max eig(B)` span its kernel.
    pub kernel_rel_tol: f64,
    /// Kernel directions `v` of `B` must satisfy `‖A v‖ ≤ kernel_check_tol · max(‖A‖_F, tiny)`.
    pub kernel_check_tol: f64,
}

impl Default for GenEigOptions {
    fn default() -> Self {
        Self { kernel_rel_tol: 1e-10, kernel_check_tol: 1e-7 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GenEigDiagnostics {
    pub dim: usize,
    pub kernel_dim: usize,
    /// Largest `‖A v‖ / ‖A‖_F` over the discarded kernel directions.
    pub kernel_residual: f64,
    /// Smallest retained eigenvalue of `B`, relative to its largest.
    pub min_retained_ratio: f64,
}

/// Largest eigenvalue `μ` of `A v = μ B v` for symmetric positive
/// semidefinite `A`, `B` whose kernels satisfy `ker B ⊂ ker A`.
///
/// `B` is diagonalized, its numerical kernel is removed, and the largest
/// eigenvalue of `S^{-1/2} Vᵀ A V S^{-1/2}` on the retained subspace is
/// returned. A kernel direction of `B` on which `A` does not vanish makes the
/// quotient unbounded and is reported as an error.
pub fn gen_eig_max(a: &DenseMatrix, b: &DenseMatrix, opts: GenEigOptions) -> Result<(f64, GenEigDiagnostics)> {
    if !a.is_square() || !b.is_square() || a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "pencil shapes {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let n = a.nrows();
    let eig_b = sym_eigen(b)?;
    let bmax = eig_b.values.last().copied().unwrap_or(0.0);
    let anorm = a.frobenius_norm();
    let threshold = opts.kernel_rel_tol * bmax.max(0.0);
    let mut diag = GenEigDiagnostics { dim: n, ..Default::default() };

    let mut retained = Vec::new();
    for (k, &s) in eig_b.values.iter().enumerate() {
        let vk = eig_b.vectors.column(k);
        if s > threshold && s > 0.0 {
            retained.push((k, s));
        } else {
            diag.kernel_dim += 1;
            let av = a.matvec(&vk);
            let rel = if anorm > 0.0 { super::norm2(&av) / anorm } else { 0.0 };
            diag.kernel_residual = diag.kernel_residual.max(rel);
        }
    }
    if diag.kernel_residual > opts.kernel_check_tol {
        return Err(Error::QuotientUnbounded { residual: diag.kernel_residual });
    }
    if retained.is_empty() {
        return Ok((0.0, diag));
    }
    diag.min_retained_ratio = retained.iter().map(|r| r.1).fold(f64::INFINITY, f64::min) / bmax;

    // W = V_r S_r^{-1/2}, reduced matrix Wᵀ A W
    let m = retained.len();
    let mut w = DenseMatrix::zeros(n, m);
    for (c, &(k, s)) in retained.iter().enumerate() {
        let scale = 1.0 / s.sqrt();
        for i in 0..n {
            w[(i, c)] = eig_b.vectors[(i, k)] * scale;
        }
    }
    let mut reduced = a.congruence(&w);
    reduced.symmetrize();
    let eig = sym_eigen(&reduced)?;
    let mu = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok((mu, diag))
}
