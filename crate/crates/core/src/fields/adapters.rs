use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{Domain, Jet, ScalarField};

/// Step selection for central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdSteps {
    /// `ε^{1/3}·max(1,|x|)` for gradients, `ε^{1/4}·max(1,|x|)` for Hessians.
    Auto,
    /// The same fixed step for both.
    Fixed(f64),
}

impl FdSteps {
    fn steps(self, x: &[f64]) -> (f64, f64) {
        match self {
            FdSteps::Auto => {
                let scale = super::norm(x).max(1.0);
                (f64::EPSILON.cbrt() * scale, f64::EPSILON.powf(0.25) * scale)
            }
            FdSteps::Fixed(h) => (h, h),
        }
    }
}

/// Replaces a field's derivatives with second-order central differences of its
/// values. Queries within `2h` of the boundary are rejected.
#[derive(Debug, Clone)]
pub struct FiniteDifference<F> {
    pub inner: F,
    pub steps: FdSteps,
}

impl<F: ScalarField> FiniteDifference<F> {
    pub fn new(inner: F) -> Self {
        Self { inner, steps: FdSteps::Auto }
    }

    pub fn with_step(inner: F, h: f64) -> Self {
        Self { inner, steps: FdSteps::Fixed(h) }
    }
}

impl<F: ScalarField> ScalarField for FiniteDifference<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn margin(&self, x: &[f64]) -> f64 {
        let (h1, h2) = self.steps.steps(x);
        2.0 * h1.max(h2) + self.inner.margin(x)
    }
    fn contains(&self, x: &[f64]) -> bool {
        let m = self.margin(x);
        self.inner.domain().contains(x, m) && self.inner.contains(x)
    }
    fn is_analytic(&self) -> bool {
        false
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.inner.value_at(x)
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.dim();
        let (h1, h2) = self.steps.steps(x);
        let f = |dx: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for (i, d) in dx {
                y[*i] += d;
            }
            self.inner.value_at(&y)
        };
        let f0 = self.inner.value_at(x);
        let gradient = DVector::from_fn(n, |i, _| (f(&[(i, h1)]) - f(&[(i, -h1)])) / (2.0 * h1));
        let mut hessian = DMatrix::zeros(n, n);
        for i in 0..n {
            hessian[(i, i)] = (f(&[(i, h2)]) - 2.0 * f0 + f(&[(i, -h2)])) / (h2 * h2);
            for j in (i + 1)..n {
                let v = (f(&[(i, h2), (j, h2)]) - f(&[(i, h2), (j, -h2)]) - f(&[(i, -h2), (j, h2)])
                    + f(&[(i, -h2), (j, -h2)]))
                    / (4.0 * h2 * h2);
                hessian[(i, j)] = v;
                hessian[(j, i)] = v;
            }
        }
        Jet { value: f0, gradient, hessian }
    }
    fn label(&self) -> String {
        format!("fd[{:?}]({})", self.steps, self.inner.label())
    }
}

/// `x ↦ u(Q x)` for an orthogonal `Q`; an isometry of the flat base.
#[derive(Debug, Clone)]
pub struct Rotated<F> {
    pub inner: F,
    pub rotation: DMatrix<f64>,
}

impl<F: ScalarField> Rotated<F> {
    pub fn new(inner: F, rotation: DMatrix<f64>) -> Self {
        Self { inner, rotation }
    }

    fn map(&self, x: &[f64]) -> Vec<f64> {
        (&self.rotation * DVector::from_column_slice(x)).as_slice().to_vec()
    }
}

impl<F: ScalarField> ScalarField for Rotated<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.inner.contains(&self.map(x))
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.inner.value_at(&self.map(x))
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let j = self.inner.jet_at(&self.map(x));
        let qt = self.rotation.transpose();
        Jet {
            value: j.value,
            gradient: &qt * j.gradient,
            hessian: &qt * j.hessian * &self.rotation,
        }
    }
}

/// `x ↦ c · u(x)`.
#[derive(Debug, Clone)]
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: ScalarField> ScalarField for Scaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.inner.contains(x)
    }
    fn margin(&self, x: &[f64]) -> f64 {
        self.inner.margin(x)
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.factor * self.inner.value_at(x)
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let j = self.inner.jet_at(x);
        Jet {
            value: self.factor * j.value,
            gradient: j.gradient * self.factor,
            hessian: j.hessian * self.factor,
        }
    }
    fn label(&self) -> String {
        format!("{} * ({})", self.factor, self.inner.label())
    }
}

type JetFn = dyn Fn(&[f64]) -> Jet + Send + Sync;

/// A field given directly by a jet closure.
#[derive(Clone)]
pub struct FnField {
    pub n: usize,
    pub domain: Domain,
    pub jet: Arc<JetFn>,
}

impl FnField {
    pub fn new(n: usize, domain: Domain, jet: impl Fn(&[f64]) -> Jet + Send + Sync + 'static) -> Self {
        Self { n, domain, jet: Arc::new(jet) }
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField").field("n", &self.n).field("domain", &self.domain).finish()
    }
}

impl ScalarField for FnField {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        self.domain.clone()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        (self.jet)(x).value
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        (self.jet)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Quadratic, SphereCap};

    #[test]
    fn fd_rejects_boundary_band() {
        let cap = FiniteDifference::with_step(SphereCap::hemisphere(2), 1e-3);
        assert!(cap.jet(&[0.9985, 0.0]).is_err());
        assert!(cap.jet(&[0.99, 0.0]).is_ok());
    }

    #[test]
    fn fd_converges_at_second_order() {
        let cap = SphereCap { n: 2, radius: 1.0, center_height: 0.0, upper: true };
        let x = [0.3, 0.2];
        let exact = cap.jet(&x).unwrap();
        let err = |h: f64| {
            let j = FiniteDifference::with_step(cap.clone(), h).jet(&x).unwrap();
            (j.hessian - &exact.hessian).amax().max((j.gradient - &exact.gradient).amax())
        };
        let (e1, e2, e3) = (err(1e-2), err(5e-3), err(2.5e-3));
        let slope1 = (e1 / e2).log2();
        let slope2 = (e2 / e3).log2();
        assert!(slope1 > 1.8 && slope2 > 1.8, "slopes {slope1} {slope2}");
    }

    #[test]
    fn rotation_preserves_values() {
        let q = Quadratic { weights: vec![1.0, 3.0] };
        let (s, c) = 0.7f64.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let r = Rotated::new(q.clone(), rot.clone());
        let y = [0.4, -0.2];
        let x = rot.transpose() * DVector::from_column_slice(&y);
        let jr = r.jet(x.as_slice()).unwrap();
        let jq = q.jet(&y).unwrap();
        assert!((jr.value - jq.value).abs() < 1e-15);
        assert!((jr.gradient.norm() - jq.gradient.norm()).abs() < 1e-14);
    }
}
