use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    /// Builds the CSR matrix. With `symmetric` set, structural symmetry is
    /// checked and recorded.
    pub fn build(mut self, symmetric: bool) -> Result<SparseMatrix> {
        if self.entries.iter().any(|e| !e.2.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let m = SparseMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values, symmetric };
        if symmetric && !m.is_structurally_symmetric() {
            return Err(Error::InvalidArgument("sparse matrix flagged symmetric is not".into()));
        }
        Ok(m)
    }
}

impl SparseMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.col_idx[lo..hi].iter().zip(&self.values[lo..hi]).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    fn is_structurally_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        (0..self.nrows).all(|i| {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            self.col_idx[lo..hi].iter().all(|&j| {
                let (l2, h2) = (self.row_ptr[j], self.row_ptr[j + 1]);
                self.col_idx[l2..h2].binary_search(&i).is_ok()
            })
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for an SPD matrix. Stops once
/// `‖A x − b‖ ≤ rel_tol ‖b‖`; gives up after `10·n` iterations.
pub fn cg_solve(a: &SparseMatrix, b: &[f64], rel_tol: f64) -> Result<(Vec<f64>, CgReport)> {
    cg_solve_capped(a, b, rel_tol, 10 * a.nrows().max(1))
}

/// [`cg_solve`] with an explicit iteration cap.
pub fn cg_solve_capped(a: &SparseMatrix, b: &[f64], rel_tol: f64, cap: usize) -> Result<(Vec<f64>, CgReport)> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension(format!("cg: {}x{} matrix, rhs {}", a.nrows(), a.ncols(), b.len())));
    }
    let bnorm = super::norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, CgReport { iterations: 0, relative_residual: 0.0 }));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = super::dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=cap {
        a.matvec_into(&p, &mut ap);
        let pap = super::dot(&p, &ap);
        if rz == 0.0 {
            return Ok((x, CgReport { iterations: it - 1, relative_residual: 0.0 }));
        }
        if pap <= 0.0 {
            return Err(Error::NotSpd { pivot: it, value: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = super::norm2(&r) / bnorm;
        if res <= rel_tol {
            // recompute the true residual to guard against drift of the recurrence
            let ax = a.matvec(&x);
            let true_res = super::norm2(&ax.iter().zip(b).map(|(p, q)| q - p).collect::<Vec<_>>()) / bnorm;
            if true_res <= rel_tol {
                return Ok((x, CgReport { iterations: it, relative_residual: true_res }));
            }
            r = ax.iter().zip(b).map(|(p, q)| q - p).collect();
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = super::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: cap, residual: res })
}
