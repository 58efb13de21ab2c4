//! Built-in height functions with closed-form derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{norm, Domain, Jet, ScalarField};

/// `u(x) = c₀ + Σ cᵢ xᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub constant: f64,
    pub slope: Vec<f64>,
}

impl Affine {
    pub fn constant(n: usize, c: f64) -> Self {
        Self { constant: c, slope: vec![0.0; n] }
    }
}

impl ScalarField for Affine {
    fn dim(&self) -> usize {
        self.slope.len()
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.constant + self.slope.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.dim();
        Jet {
            value: self.value_at(x),
            gradient: DVector::from_column_slice(&self.slope),
            hessian: DMatrix::zeros(n, n),
        }
    }
    fn label(&self) -> String {
        format!("affine(c0={}, slope={:?})", self.constant, self.slope)
    }
}

/// `u(x) = ½ Σ wᵢ xᵢ²`. Unit weights give the paraboloid; unequal weights an
/// anisotropic cup.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub weights: Vec<f64>,
}

impl Quadratic {
    pub fn paraboloid(n: usize) -> Self {
        Self { weights: vec![1.0; n] }
    }
}

impl ScalarField for Quadratic {
    fn dim(&self) -> usize {
        self.weights.len()
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        0.5 * self.weights.iter().zip(x).map(|(w, v)| w * v * v).sum::<f64>()
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.dim();
        Jet {
            value: self.value_at(x),
            gradient: DVector::from_fn(n, |i, _| self.weights[i] * x[i]),
            hessian: DMatrix::from_fn(n, n, |i, j| if i == j { self.weights[i] } else { 0.0 }),
        }
    }
    fn label(&self) -> String {
        format!("quadratic(weights={:?})", self.weights)
    }
}

/// `u(x) = c + s √(ρ² − |x|²)` with `s = ±1`: the upper (`s = 1`) or lower
/// half of the round sphere of radius `ρ` centred at `(0, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCap {
    pub n: usize,
    pub radius: f64,
    pub center_height: f64,
    pub upper: bool,
}

impl SphereCap {
    pub fn hemisphere(n: usize) -> Self {
        Self { n, radius: 1.0, center_height: 0.0, upper: true }
    }

    fn sign(&self) -> f64 {
        if self.upper {
            1.0
        } else {
            -1.0
        }
    }
}

impl ScalarField for SphereCap {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        Domain::Ball { radius: self.radius }
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        let q = (self.radius * self.radius - x.iter().map(|v| v * v).sum::<f64>()).sqrt();
        self.center_height + self.sign() * q
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.n;
        let s = self.sign();
        let q2 = self.radius * self.radius - x.iter().map(|v| v * v).sum::<f64>();
        let q = q2.sqrt();
        let q3 = q2 * q;
        Jet {
            value: self.center_height + s * q,
            gradient: DVector::from_fn(n, |i, _| -s * x[i] / q),
            hessian: DMatrix::from_fn(n, n, |i, j| {
                let d = if i == j { 1.0 / q } else { 0.0 };
                -s * (d + x[i] * x[j] / q3)
            }),
        }
    }
    fn label(&self) -> String {
        format!(
            "sphere-cap(radius={}, center={}, {})",
            self.radius,
            self.center_height,
            if self.upper { "upper" } else { "lower" }
        )
    }
}

/// A monomial `c · Π xᵢ^{kᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Sum of monomials, optionally restricted to a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub n: usize,
    pub terms: Vec<Monomial>,
    pub domain: Domain,
}

impl Polynomial {
    /// Coefficients listed in graded-lexicographic order of exponents up to
    /// `degree` (for `n = 2`: 1, x, y, x², xy, y², x³, …).
    pub fn from_graded_coefficients(n: usize, degree: u32, coefs: &[f64]) -> Option<Self> {
        let exps = graded_exponents(n, degree);
        if coefs.len() > exps.len() {
            return None;
        }
        let terms = coefs
            .iter()
            .zip(exps)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, p)| Monomial { coef: *c, powers: p })
            .collect();
        Some(Self { n, terms, domain: Domain::Whole })
    }
}

/// Exponent vectors of total degree ≤ `degree`, graded, lexicographically
/// descending within a degree.
pub fn graded_exponents(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=total).rev() {
            prefix.push(k);
            rec(n, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=degree {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn pow_and_derivs(x: f64, k: u32) -> (f64, f64, f64) {
    match k {
        0 => (1.0, 0.0, 0.0),
        1 => (x, 1.0, 0.0),
        _ => {
            let kf = k as f64;
            (x.powi(k as i32), kf * x.powi(k as i32 - 1), kf * (kf - 1.0) * x.powi(k as i32 - 2))
        }
    }
}

impl ScalarField for Polynomial {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        self.domain.clone()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.powers.iter().zip(x).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.n;
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        let mut p = vec![(0.0, 0.0, 0.0); n];
        for t in &self.terms {
            for i in 0..n {
                p[i] = pow_and_derivs(x[i], t.powers[i]);
            }
            let prod_except = |skip: &[usize]| -> f64 {
                (0..n).filter(|i| !skip.contains(i)).map(|i| p[i].0).product()
            };
            value += t.coef * prod_except(&[]);
            for i in 0..n {
                if t.powers[i] == 0 {
                    continue;
                }
                grad[i] += t.coef * p[i].1 * prod_except(&[i]);
                hess[(i, i)] += t.coef * p[i].2 * prod_except(&[i]);
                for j in (i + 1)..n {
                    if t.powers[j] == 0 {
                        continue;
                    }
                    let v = t.coef * p[i].1 * p[j].1 * prod_except(&[i, j]);
                    hess[(i, j)] += v;
                    hess[(j, i)] += v;
                }
            }
        }
        Jet { value, gradient: grad, hessian: hess }
    }
    fn label(&self) -> String {
        format!("polynomial(n={}, terms={})", self.n, self.terms.len())
    }
}

/// A plane wave `amplitude · sin(k·x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub wavevector: Vec<f64>,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigSum {
    pub n: usize,
    pub waves: Vec<Wave>,
}

impl ScalarField for TrigSum {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amplitude * (dot(&w.wavevector, x) + w.phase).sin())
            .sum()
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.n;
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for w in &self.waves {
            let arg = dot(&w.wavevector, x) + w.phase;
            let (s, c) = arg.sin_cos();
            value += w.amplitude * s;
            for i in 0..n {
                grad[i] += w.amplitude * c * w.wavevector[i];
                for j in 0..n {
                    hess[(i, j)] -= w.amplitude * s * w.wavevector[i] * w.wavevector[j];
                }
            }
        }
        Jet { value, gradient: grad, hessian: hess }
    }
    fn label(&self) -> String {
        format!("trig-sum(n={}, waves={})", self.n, self.waves.len())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pointwise sum of fields of the same dimension; the domain is the first
/// summand's.
#[derive(Debug)]
pub struct SumField {
    pub parts: Vec<Box<dyn ScalarField>>,
}

impl ScalarField for SumField {
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }
    fn domain(&self) -> Domain {
        self.parts[0].domain()
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.parts.iter().all(|p| p.contains(x))
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.parts.iter().map(|p| p.value_at(x)).sum()
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let mut it = self.parts.iter();
        let mut acc = it.next().expect("non-empty sum").jet_at(x);
        for p in it {
            let j = p.jet_at(x);
            acc.value += j.value;
            acc.gradient += j.gradient;
            acc.hessian += j.hessian;
        }
        acc
    }
    fn is_analytic(&self) -> bool {
        self.parts.iter().all(|p| p.is_analytic())
    }
    fn label(&self) -> String {
        let labels: Vec<String> = self.parts.iter().map(|p| p.label()).collect();
        labels.join(" + ")
    }
}

/// A profile `p(r)` with first and second derivatives, for radial fields.
pub trait RadialProfile: Send + Sync + fmt::Debug {
    /// `(p, p′, p″)` at radius `r`.
    fn eval(&self, r: f64) -> (f64, f64, f64);

    /// Admissible set of base points, as a radial domain.
    fn radial_domain(&self) -> Domain;

    fn profile_label(&self) -> String {
        format!("{self:?}")
    }
}

/// `u(x) = p(|x|)` on `ℝⁿ`.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub n: usize,
    pub profile: Arc<dyn RadialProfile>,
}

impl RadialField {
    pub fn new(n: usize, profile: Arc<dyn RadialProfile>) -> Self {
        Self { n, profile }
    }
}

impl ScalarField for RadialField {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        self.profile.radial_domain()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.profile.eval(norm(x)).0
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.n;
        let r = norm(x);
        let (p, dp, ddp) = self.profile.eval(r);
        if r == 0.0 {
            // Smooth radial profiles have p′(0) = 0 and Hessian p″(0)·I.
            return Jet {
                value: p,
                gradient: DVector::zeros(n),
                hessian: DMatrix::identity(n, n) * ddp,
            };
        }
        let unit: Vec<f64> = x.iter().map(|v| v / r).collect();
        Jet {
            value: p,
            gradient: DVector::from_fn(n, |i, _| dp * unit[i]),
            hessian: DMatrix::from_fn(n, n, |i, j| {
                let uu = unit[i] * unit[j];
                let d = if i == j { 1.0 } else { 0.0 };
                ddp * uu + dp / r * (d - uu)
            }),
        }
    }
    fn label(&self) -> String {
        format!("radial(n={}, {})", self.n, self.profile.profile_label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FiniteDifference;
    use approx::assert_relative_eq;

    #[test]
    fn paraboloid_jet_is_exact() {
        let u = Quadratic::paraboloid(2);
        let j = u.jet(&[1.0, 0.0]).unwrap();
        assert_eq!(j.value, 0.5);
        assert_eq!(j.gradient.as_slice(), &[1.0, 0.0]);
        assert_eq!(j.hessian, DMatrix::identity(2, 2));
    }

    #[test]
    fn hemisphere_pole() {
        let u = SphereCap::hemisphere(2);
        let j = u.jet(&[0.0, 0.0]).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient.as_slice(), &[0.0, 0.0]);
        assert_eq!(j.hessian, -DMatrix::identity(2, 2));
        assert!(u.jet(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn graded_exponent_order() {
        let e = graded_exponents(2, 2);
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(graded_exponents(3, 3).len(), 20);
    }

    #[test]
    fn polynomial_matches_fd() {
        let p = Polynomial::from_graded_coefficients(
            3,
            3,
            &[0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8, 0.9, -1.0, 0.3, -0.2, 0.1, 0.05, 0.4, -0.3, 0.2, 0.6, -0.7, 0.25],
        )
        .unwrap();
        let x = [0.3, -0.4, 0.2];
        let exact = p.jet(&x).unwrap();
        let fd = FiniteDifference::new(p.clone()).jet(&x).unwrap();
        assert_relative_eq!(exact.value, fd.value, epsilon = 1e-15);
        assert!((exact.gradient - fd.gradient).amax() < 1e-8);
        assert!((exact.hessian - fd.hessian).amax() < 1e-6);
    }

    #[test]
    fn trig_matches_fd() {
        let t = TrigSum {
            n: 2,
            waves: vec![
                Wave { amplitude: 0.3, wavevector: vec![1.2, -0.7], phase: 0.4 },
                Wave { amplitude: -0.2, wavevector: vec![0.5, 2.0], phase: -1.1 },
            ],
        };
        let x = [0.2, 0.7];
        let exact = t.jet(&x).unwrap();
        let fd = FiniteDifference::new(t.clone()).jet(&x).unwrap();
        assert!((exact.gradient - fd.gradient).amax() < 1e-8);
        assert!((exact.hessian - fd.hessian).amax() < 1e-6);
    }

    #[derive(Debug)]
    struct Cubic;
    impl RadialProfile for Cubic {
        fn eval(&self, r: f64) -> (f64, f64, f64) {
            (r * r * r, 3.0 * r * r, 6.0 * r)
        }
        fn radial_domain(&self) -> Domain {
            Domain::Whole
        }
    }

    #[test]
    fn radial_matches_fd() {
        let f = RadialField::new(3, Arc::new(Cubic));
        let x = [0.3, -0.2, 0.5];
        let exact = f.jet(&x).unwrap();
        let fd = FiniteDifference::new(f.clone()).jet(&x).unwrap();
        assert!((exact.gradient - fd.gradient).amax() < 1e-8);
        assert!((exact.hessian - fd.hessian).amax() < 1e-6);
    }

    #[test]
    fn sphere_cap_matches_fd() {
        let c = SphereCap { n: 3, radius: 1.5, center_height: 0.2, upper: false };
        let x = [0.3, 0.4, -0.5];
        let exact = c.jet(&x).unwrap();
        let fd = FiniteDifference::new(c.clone()).jet(&x).unwrap();
        assert!((exact.gradient - fd.gradient).amax() < 1e-8);
        assert!((exact.hessian - fd.hessian).amax() < 1e-6);
    }
}
