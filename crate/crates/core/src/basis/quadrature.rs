use std::sync::OnceLock;

use crate::{Error, Result};

/// Quadrature on the reference triangle. Weights sum to its area `1/2`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub exactness: usize,
    /// Barycentric coordinates `(λ₀, λ₁, λ₂)`.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Reference coordinates `(ξ, η) = (λ₁, λ₂)` of point `q`.
    pub fn xi(&self, q: usize) -> [f64; 2] {
        [self.points[q][1], self.points[q][2]]
    }

    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `∫ λ₀^a λ₁^b λ₂^c` over the reference triangle, `a! b! c! / (a+b+c+2)!`.
pub fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
}

/// Gauss–Legendre points and weights on `[0, 1]`.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x.push(0.5 * (1.0 - z));
        w.push(1.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

fn duffy(exactness: usize) -> QuadratureRule {
    // (s, t) in [0,1]², ξ = s, η = t (1 − s), Jacobian 1 − s
    let n = (exactness + 2).div_ceil(2);
    let (x, w) = gauss_legendre_01(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&s, &ws) in x.iter().zip(&w) {
        for (&t, &wt) in x.iter().zip(&w) {
            let xi = s;
            let eta = t * (1.0 - s);
            points.push([1.0 - xi - eta, xi, eta]);
            weights.push(ws * wt * (1.0 - s));
        }
    }
    QuadratureRule { exactness, points, weights }
}

fn symmetric(exactness: usize) -> Option<QuadratureRule> {
    let orbit3 = |a: f64, w: f64, pts: &mut Vec<[f64; 3]>, ws: &mut Vec<f64>| {
        let b = 1.0 - 2.0 * a;
        for p in [[b, a, a], [a, b, a], [a, a, b]] {
            pts.push(p);
            ws.push(w);
        }
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match exactness {
        0 | 1 => {
            points.push([1.0 / 3.0; 3]);
            weights.push(0.5);
        }
        2 => orbit3(1.0 / 6.0, 1.0 / 6.0, &mut points, &mut weights),
        3..=5 => {
            // 7-point degree-5 rule with positive weights
            let s15 = 15f64.sqrt();
            points.push([1.0 / 3.0; 3]);
            weights.push(9.0 / 80.0);
            orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 2400.0, &mut points, &mut weights);
            orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 2400.0, &mut points, &mut weights);
        }
        _ => return None,
    }
    Some(QuadratureRule { exactness, points, weights })
}

fn verify(rule: &QuadratureRule, degree: usize) -> Result<()> {
    for total in 0..=degree as u32 {
        for a in 0..=total {
            for b in 0..=total - a {
                let c = total - a - b;
                let exact = monomial_integral(a, b, c);
                let approx =
                    rule.integrate(|l| l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32));
                if (approx - exact).abs() > 1e-14 * exact.max(1e-300) + 1e-17 {
                    return Err(Error::InvalidArgument(format!(
                        "quadrature of exactness {} misses λ^({a},{b},{c}): {approx:e} vs {exact:e}",
                        rule.exactness
                    )));
                }
            }
        }
    }
    Ok(())
}

const MAX_EXACTNESS: usize = 20;

/// Quadrature exact for polynomials of total degree `exactness`, cached.
/// Symmetric positive-weight rules up to degree 5, collapsed Gauss–Legendre
/// beyond. Every rule is checked against closed-form monomial integrals on
/// first use.
pub fn quad_rule(exactness: usize) -> Result<&'static QuadratureRule> {
    static RULES: [OnceLock<Result<QuadratureRule, String>>; MAX_EXACTNESS + 1] =
        [const { OnceLock::new() }; MAX_EXACTNESS + 1];
    if exactness > MAX_EXACTNESS {
        return Err(Error::UnsupportedQuadrature(exactness));
    }
    let entry = RULES[exactness].get_or_init(|| {
        let mut rule = symmetric(exactness).unwrap_or_else(|| duffy(exactness));
        rule.exactness = exactness;
        verify(&rule, exactness).map_err(|e| e.to_string())?;
        Ok(rule)
    });
    entry.as_ref().map_err(|msg| Error::InvalidArgument(msg.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroid_rule() {
        let r = quad_rule(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.weights[0], 0.5);
        assert_eq!(r.xi(0), [1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn weights_sum_to_half() {
        for e in 0..=20 {
            let r = quad_rule(e).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 0.5).abs() < 1e-15, "exactness {e}");
        }
    }

    #[test]
    fn bubble_integral() {
        assert!((monomial_integral(1, 1, 1) - 1.0 / 120.0).abs() < 1e-18);
        for e in 3..=20 {
            let v = quad_rule(e).unwrap().integrate(|l| l[0] * l[1] * l[2]);
            assert!((v - 1.0 / 120.0).abs() < 1e-15, "exactness {e}");
        }
    }

    #[test]
    fn positive_weights() {
        for e in 0..=20 {
            assert!(quad_rule(e).unwrap().weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn unsupported() {
        assert!(matches!(quad_rule(21), Err(Error::UnsupportedQuadrature(21))));
    }

    #[test]
    fn gauss_legendre_exact() {
        for n in 1..10 {
            let (x, w) = gauss_legendre_01(n);
            for k in 0..2 * n {
                let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((v - 1.0 / (k + 1) as f64).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }
}
