#![allow(dead_code)]

use std::collections::HashMap;

use certqi::mesh::{read_medit, Mesh};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unstructured_mesh() -> Mesh {
    read_medit(include_str!("../data/unstructured.mesh")).expect("test mesh parses")
}

pub fn shape_kappa(x: [[f64; 2]; 3]) -> f64 {
    let l = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let e = [l(x[1], x[2]), l(x[2], x[0]), l(x[0], x[1])];
    let area = 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[1][1] - x[0][1]) * (x[2][0] - x[0][0])).abs();
    let h = e.iter().copied().fold(0.0, f64::max);
    h / (4.0 * area / e.iter().sum::<f64>())
}

/// A star of triangles around vertex 0. Interior patches close the fan;
/// boundary patches span an angle below 2π, leaving vertex 0 on the boundary.
pub fn random_patch(rng: &mut impl Rng, boundary: bool, kappa_max: f64) -> Mesh {
    loop {
        let (m, span) = if boundary {
            (rng.gen_range(2..=5), rng.gen_range(0.4..1.0) * std::f64::consts::PI * 1.5)
        } else {
            (rng.gen_range(5..=8), 2.0 * std::f64::consts::PI)
        };
        let scale = rng.gen_range(0.2..5.0);
        let shift = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let n_ring = if boundary { m + 1 } else { m };
        let mut vertices = vec![shift];
        for k in 0..n_ring {
            let jitter = if boundary && (k == 0 || k == m) { 0.0 } else { rng.gen_range(-0.3..0.3) };
            let theta = span * (k as f64 + jitter) / m as f64;
            let r = scale * rng.gen_range(0.6..1.4);
            vertices.push([shift[0] + r * theta.cos(), shift[1] + r * theta.sin()]);
        }
        let triangles: Vec<[usize; 3]> =
            (0..m).map(|k| [0, 1 + k, 1 + (k + 1) % n_ring]).collect();
        let ok = triangles.iter().all(|t| shape_kappa(t.map(|v| vertices[v])) <= kappa_max);
        if !ok {
            continue;
        }
        if let Ok(mesh) = Mesh::new(vertices, triangles) {
            return mesh;
        }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]` from the Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (0.5 * (eig.eigenvalues[i] + 1.0), eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Collapsed Gauss rule on a physical triangle: `(point, weight)` pairs.
pub fn triangle_rule(x: [[f64; 2]; 3], n: usize) -> Vec<([f64; 2], f64)> {
    let (t, w) = golub_welsch(n);
    let det = ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[1][1] - x[0][1]) * (x[2][0] - x[0][0])).abs();
    let mut out = Vec::with_capacity(n * n);
    for (u, wu) in t.iter().zip(&w) {
        for (v, wv) in t.iter().zip(&w) {
            let (xi, eta) = (*u, v * (1.0 - u));
            let p = [
                x[0][0] + xi * (x[1][0] - x[0][0]) + eta * (x[2][0] - x[0][0]),
                x[0][1] + xi * (x[1][1] - x[0][1]) + eta * (x[2][1] - x[0][1]),
            ];
            out.push((p, wu * wv * (1.0 - u) * det));
        }
    }
    out
}

/// Barycentric coordinates and their (constant) gradients.
pub struct P1Element {
    pub x: [[f64; 2]; 3],
    pub grads: [[f64; 2]; 3],
    pub area: f64,
}

impl P1Element {
    pub fn new(x: [[f64; 2]; 3]) -> Self {
        let t = nalgebra::Matrix2::new(x[1][0] - x[0][0], x[2][0] - x[0][0], x[1][1] - x[0][1], x[2][1] - x[0][1]);
        let inv = t.try_inverse().unwrap();
        let g1 = [inv[(0, 0)], inv[(0, 1)]];
        let g2 = [inv[(1, 0)], inv[(1, 1)]];
        Self { x, grads: [[-g1[0] - g2[0], -g1[1] - g2[1]], g1, g2], area: 0.5 * t.determinant().abs() }
    }

    pub fn bary(&self, p: [f64; 2]) -> [f64; 3] {
        let d = [p[0] - self.x[0][0], p[1] - self.x[0][1]];
        let l1 = self.grads[1][0] * d[0] + self.grads[1][1] * d[1];
        let l2 = self.grads[2][0] * d[0] + self.grads[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }
}

fn legendre01(k: usize, t: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0 * t - 1.0,
        _ => unreachable!(),
    }
}

/// Lowest-order-plus-one Raviart–Thomas functions on one physical triangle,
/// dual to globally oriented edge moments and the two mean components.
struct Rt1Element {
    center: [f64; 2],
    coeffs: DMatrix<f64>,
}

impl Rt1Element {
    fn prime(&self, p: [f64; 2]) -> [[f64; 2]; 8] {
        let y = [p[0] - self.center[0], p[1] - self.center[1]];
        [
            [1.0, 0.0],
            [y[0], 0.0],
            [y[1], 0.0],
            [0.0, 1.0],
            [0.0, y[0]],
            [0.0, y[1]],
            [y[0] * y[0], y[1] * y[0]],
            [y[0] * y[1], y[1] * y[1]],
        ]
    }

    fn prime_div(&self, p: [f64; 2]) -> [f64; 8] {
        let y = [p[0] - self.center[0], p[1] - self.center[1]];
        [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 3.0 * y[0], 3.0 * y[1]]
    }

    fn new(x: [[f64; 2]; 3], edges: &[([f64; 2], [f64; 2]); 3], quad: &[([f64; 2], f64)], gl: &(Vec<f64>, Vec<f64>)) -> Self {
        let center = [(x[0][0] + x[1][0] + x[2][0]) / 3.0, (x[0][1] + x[1][1] + x[2][1]) / 3.0];
        let mut me = Self { center, coeffs: DMatrix::zeros(8, 8) };
        let mut g = DMatrix::<f64>::zeros(8, 8);
        for (e, (a, b)) in edges.iter().enumerate() {
            let d = [b[0] - a[0], b[1] - a[1]];
            for (t, w) in gl.0.iter().zip(&gl.1) {
                let pv = me.prime([a[0] + t * d[0], a[1] + t * d[1]]);
                for k in 0..2 {
                    for m in 0..8 {
                        g[(2 * e + k, m)] += w * legendre01(k, *t) * (pv[m][0] * d[1] - pv[m][1] * d[0]);
                    }
                }
            }
        }
        for (p, w) in quad {
            let pv = me.prime(*p);
            for m in 0..8 {
                g[(6, m)] += w * pv[m][0];
                g[(7, m)] += w * pv[m][1];
            }
        }
        me.coeffs = g.try_inverse().expect("RT1 moments unisolvent");
        me
    }

    fn eval(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let pv = self.prime(p);
        (0..8)
            .map(|j| {
                let mut v = [0.0; 2];
                for m in 0..8 {
                    v[0] += self.coeffs[(m, j)] * pv[m][0];
                    v[1] += self.coeffs[(m, j)] * pv[m][1];
                }
                v
            })
            .collect()
    }

    fn div(&self, p: [f64; 2]) -> Vec<f64> {
        let pd = self.prime_div(p);
        (0..8).map(|j| (0..8).map(|m| self.coeffs[(m, j)] * pd[m]).sum()).collect()
    }
}

/// Null space of `b` (columns), from the eigenvectors of `bᵀb`.
pub fn null_space(b: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(b.transpose() * b);
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] <= 1e-12 * max)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Largest `μ` with `A v = μ B v` over the range of `B`.
pub fn pencil_max(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(b.clone());
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-10 * max)
        .map(|i| eig.eigenvectors.column(i) / eig.eigenvalues[i].sqrt())
        .collect();
    let w = DMatrix::from_columns(&cols);
    let reduced = w.transpose() * a * &w;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    SymmetricEigen::new(reduced).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `λ_a` for degree 1 on the patch of vertex `a`, assembled from scratch with
/// an exactness-16 collapsed Gauss rule.
pub fn oracle_lambda_p1(mesh: &Mesh, a: usize) -> f64 {
    let elements: Vec<usize> = mesh.vertex_triangles(a).to_vec();
    let n_el = elements.len();
    let gl = golub_welsch(9);

    // patch boundary edges: those seen once inside the patch
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for &t in &elements {
        let tri = mesh.triangle(t);
        for i in 0..3 {
            let (u, v) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            *edge_count.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
    let mut on_boundary: HashMap<usize, bool> = HashMap::new();
    for (&(u, v), &c) in &edge_count {
        if c == 1 {
            on_boundary.insert(u, true);
            on_boundary.insert(v, true);
        }
    }
    let mut free: Vec<usize> = elements
        .iter()
        .flat_map(|&t| mesh.triangle(t))
        .filter(|v| !on_boundary.contains_key(v))
        .collect();
    free.sort_unstable();
    free.dedup();

    let nb = 3 * n_el;
    let p1: Vec<P1Element> = elements.iter().map(|&t| P1Element::new(mesh.triangle_coords(t))).collect();

    // broken stiffness
    let mut kb = DMatrix::<f64>::zeros(nb, nb);
    for (k, el) in p1.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                kb[(3 * k + i, 3 * k + j)] =
                    el.area * (el.grads[i][0] * el.grads[j][0] + el.grads[i][1] * el.grads[j][1]);
            }
        }
    }
    // conforming patch space: hats of the free vertices, as broken vectors
    let mut emb = DMatrix::<f64>::zeros(nb, free.len());
    for (k, &t) in elements.iter().enumerate() {
        for (i, v) in mesh.triangle(t).iter().enumerate() {
            if let Ok(c) = free.binary_search(v) {
                emb[(3 * k + i, c)] = 1.0;
            }
        }
    }
    // I(ψ_a u_h) keeps only the center value of each element
    let mut hat = DMatrix::<f64>::zeros(nb, nb);
    for (k, &t) in elements.iter().enumerate() {
        let ia = mesh.triangle(t).iter().position(|&v| v == a).unwrap();
        hat[(3 * k + ia, 3 * k + ia)] = 1.0;
    }
    let d = if free.is_empty() {
        hat.clone()
    } else {
        let s = emb.transpose() * &kb * &emb;
        let proj = &emb * s.try_inverse().unwrap() * emb.transpose() * &kb;
        (DMatrix::identity(nb, nb) - proj) * &hat
    };
    let a_pencil = d.transpose() * &kb * &d;

    // flux space
    let mut x_index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut n_x = 0;
    let mut local_to_x = Vec::new();
    let mut rts = Vec::new();
    let mut quads = Vec::new();
    for &t in &elements {
        let tri = mesh.triangle(t);
        let x = mesh.triangle_coords(t);
        let mut edges = [([0.0; 2], [0.0; 2]); 3];
        let mut ids = Vec::with_capacity(8);
        for e in 0..3 {
            let (u, v) = (tri[(e + 1) % 3], tri[(e + 2) % 3]);
            let (lo, hi) = (u.min(v), u.max(v));
            edges[e] = (mesh.vertex(lo), mesh.vertex(hi));
            for kk in 0..2 {
                let id = *x_index.entry((lo, hi, kk)).or_insert_with(|| {
                    n_x += 1;
                    n_x - 1
                });
                ids.push(id);
            }
        }
        ids.push(n_x);
        ids.push(n_x + 1);
        n_x += 2;
        let quad = triangle_rule(x, 9);
        rts.push(Rt1Element::new(x, &edges, &quad, &gl));
        quads.push(quad);
        local_to_x.push(ids);
    }
    let n_y = 3 * n_el;
    let mut m = DMatrix::<f64>::zeros(n_x, n_x);
    let mut bdiv = DMatrix::<f64>::zeros(n_y, n_x);
    let mut f = DMatrix::<f64>::zeros(n_x, nb);
    for (k, &t) in elements.iter().enumerate() {
        let ia = mesh.triangle(t).iter().position(|&v| v == a).unwrap();
        let el = &p1[k];
        let c = rts[k].center;
        for (p, w) in &quads[k] {
            let v = rts[k].eval(*p);
            let dv = rts[k].div(*p);
            let lam = el.bary(*p);
            let y = [1.0, p[0] - c[0], p[1] - c[1]];
            for i in 0..8 {
                let gi = local_to_x[k][i];
                for j in 0..8 {
                    m[(gi, local_to_x[k][j])] += w * (v[i][0] * v[j][0] + v[i][1] * v[j][1]);
                }
                for l in 0..3 {
                    bdiv[(3 * k + l, gi)] += w * y[l] * dv[i];
                    // ∇(λ_ia λ_l) = λ_l ∇λ_ia + λ_ia ∇λ_l
                    let g = [
                        lam[l] * el.grads[ia][0] + lam[ia] * el.grads[l][0],
                        lam[l] * el.grads[ia][1] + lam[ia] * el.grads[l][1],
                    ];
                    f[(gi, 3 * k + l)] += w * (g[0] * v[i][0] + g[1] * v[i][1]);
                }
            }
        }
    }
    let n = null_space(&bdiv);
    let nmn = n.transpose() * &m * &n;
    let b_pencil = f.transpose() * &n * nmn.try_inverse().unwrap() * n.transpose() * &f;
    let b_pencil = (&b_pencil + b_pencil.transpose()) * 0.5;
    pencil_max(&a_pencil, &b_pencil).sqrt()
}

pub fn to_dmatrix(a: &certqi::linalg::DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.nrows(), a.ncols(), a.as_slice())
}

pub fn pass_line(name: &str, pass: bool, detail: impl std::fmt::Display) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
