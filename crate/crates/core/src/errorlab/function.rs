use std::fmt;
use std::sync::Arc;

use crate::Point;

type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
type HessFn = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

/// An analytic target function with its gradient, an optional Hessian and an
/// optional distance to the set where it fails to be smooth.
#[derive(Clone)]
pub struct FieldFunction {
    name: String,
    value: ScalarFn,
    gradient: GradFn,
    hessian: Option<HessFn>,
    kink_distance: Option<ScalarFn>,
}

impl fmt::Debug for FieldFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFunction")
            .field("name", &self.name)
            .field("hessian", &self.hessian.is_some())
            .finish_non_exhaustive()
    }
}

impl FieldFunction {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: None,
            kink_distance: None,
        }
    }

    pub fn with_hessian(mut self, hessian: impl Fn(Point) -> [[f64; 2]; 2] + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    /// Declares where the function is not smooth, as a distance to that set.
    pub fn with_kinks(mut self, distance: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.kink_distance = Some(Arc::new(distance));
        self
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| [0.0, 0.0]).with_hessian(|_| [[0.0; 2]; 2])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn value(&self, x: Point) -> f64 {
        (self.value)(x)
    }

    #[inline]
    pub fn gradient(&self, x: Point) -> [f64; 2] {
        (self.gradient)(x)
    }

    pub fn hessian(&self, x: Point) -> Option<[[f64; 2]; 2]> {
        self.hessian.as_ref().map(|h| h(x))
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    /// Distance from `x` to the declared kink set, `+∞` if none is declared.
    pub fn kink_distance(&self, x: Point) -> f64 {
        self.kink_distance.as_ref().map_or(f64::INFINITY, |d| d(x))
    }

    /// `α u + β v`, with a Hessian when both have one.
    pub fn combine(alpha: f64, u: &FieldFunction, beta: f64, v: &FieldFunction) -> Self {
        let (u1, v1, u2, v2) = (u.clone(), v.clone(), u.clone(), v.clone());
        let mut out = Self::new(
            format!("{alpha}*{}+{beta}*{}", u.name, v.name),
            move |x| alpha * u1.value(x) + beta * v1.value(x),
            move |x| {
                let (a, b) = (u2.gradient(x), v2.gradient(x));
                [alpha * a[0] + beta * b[0], alpha * a[1] + beta * b[1]]
            },
        );
        if u.has_hessian() && v.has_hessian() {
            let (u3, v3) = (u.clone(), v.clone());
            out = out.with_hessian(move |x| {
                let (a, b) = (u3.hessian(x).unwrap(), v3.hessian(x).unwrap());
                [
                    [alpha * a[0][0] + beta * b[0][0], alpha * a[0][1] + beta * b[0][1]],
                    [alpha * a[1][0] + beta * b[1][0], alpha * a[1][1] + beta * b[1][1]],
                ]
            });
        }
        let (u4, v4) = (u.clone(), v.clone());
        out.with_kinks(move |x| u4.kink_distance(x).min(v4.kink_distance(x)))
    }
}
