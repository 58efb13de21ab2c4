use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::BaseMetric;
use crate::error::{GeomError, Result};

/// Value of a conformal factor `φ(x, t)` with its spatial gradient and `φ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiJet {
    pub value: f64,
    pub grad_x: DVector<f64>,
    pub dt: f64,
}

type PhiFn = dyn Fn(&[f64], f64) -> PhiJet + Send + Sync;

/// The factor `φ` of an ambient metric `φ⁻²(g + dt²)`.
#[derive(Clone)]
pub enum ConformalFactor {
    /// `(1 + |x|² + t²)/2`, which turns the flat product into the round sphere.
    Spherical,
    Constant(f64),
    Custom { label: String, f: Arc<PhiFn> },
}

impl fmt::Debug for ConformalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalFactor::Spherical => write!(f, "Spherical"),
            ConformalFactor::Constant(c) => write!(f, "Constant({c})"),
            ConformalFactor::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

impl ConformalFactor {
    pub fn custom(label: impl Into<String>, f: impl Fn(&[f64], f64) -> PhiJet + Send + Sync + 'static) -> Self {
        ConformalFactor::Custom { label: label.into(), f: Arc::new(f) }
    }

    pub fn jet(&self, x: &[f64], t: f64) -> Result<PhiJet> {
        let j = match self {
            ConformalFactor::Spherical => {
                let mut big = x.to_vec();
                big.push(t);
                let (value, grad) = spherical_phi(&big);
                PhiJet {
                    value,
                    grad_x: grad.rows(0, x.len()).into_owned(),
                    dt: grad[x.len()],
                }
            }
            ConformalFactor::Constant(c) => PhiJet { value: *c, grad_x: DVector::zeros(x.len()), dt: 0.0 },
            ConformalFactor::Custom { f, .. } => f(x, t),
        };
        if !(j.value > 0.0) {
            return Err(GeomError::NonPositiveFactor(j.value));
        }
        if !j.value.is_finite() || !j.dt.is_finite() || j.grad_x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteResult("conformal factor"));
        }
        Ok(j)
    }
}

/// `φ(X) = (1 + |X|²)/2` and `∇φ = X` on `ℝ^{n+1}`.
pub fn spherical_phi(big_x: &[f64]) -> (f64, DVector<f64>) {
    let r2: f64 = big_x.iter().map(|v| v * v).sum();
    (0.5 * (1.0 + r2), DVector::from_column_slice(big_x))
}

/// The ambient metric: `g + dt²`, or `φ⁻²(g + dt²)` when a factor is present.
#[derive(Debug, Clone)]
pub struct AmbientSpec {
    pub base: BaseMetric,
    pub factor: Option<ConformalFactor>,
}

impl AmbientSpec {
    pub fn product(base: BaseMetric) -> Self {
        Self { base, factor: None }
    }

    /// The round unit sphere `S^{n+1}` in stereographic coordinates over a flat
    /// base.
    pub fn round_sphere(n: usize) -> Self {
        Self { base: BaseMetric::flat(n), factor: Some(ConformalFactor::Spherical) }
    }

    pub fn conformal(base: BaseMetric, factor: ConformalFactor) -> Self {
        Self { base, factor: Some(factor) }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_round_sphere(&self) -> bool {
        self.base.is_flat() && matches!(self.factor, Some(ConformalFactor::Spherical))
    }

    /// The factor's jet, with `φ ≡ 1` for the pure product.
    pub fn phi(&self, x: &[f64], t: f64) -> Result<PhiJet> {
        match &self.factor {
            Some(f) => f.jet(x, t),
            None => ConformalFactor::Constant(1.0).jet(x, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_phi_examples() {
        let (p, g) = spherical_phi(&[0.0, 0.0, 0.0]);
        assert_eq!(p, 0.5);
        assert_eq!(g.norm(), 0.0);
        let (p, g) = spherical_phi(&[0.6, 0.8, 0.0]);
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(g.as_slice(), &[0.6, 0.8, 0.0]);
        let (p, g) = spherical_phi(&[1.0, 1.0, 1.0]);
        assert_eq!(p, 2.0);
        assert_eq!(g.as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn spherical_factor_splits_time_derivative() {
        let j = ConformalFactor::Spherical.jet(&[0.3, 0.4], 0.5).unwrap();
        assert!((j.value - 0.75).abs() < 1e-15);
        assert_eq!(j.dt, 0.5);
        assert_eq!(j.grad_x.as_slice(), &[0.3, 0.4]);
    }

    #[test]
    fn non_positive_factor_rejected() {
        assert!(matches!(
            ConformalFactor::Constant(0.0).jet(&[0.0], 0.0),
            Err(GeomError::NonPositiveFactor(_))
        ));
        let bad = ConformalFactor::custom("neg", |x: &[f64], _t| PhiJet {
            value: -1.0,
            grad_x: DVector::zeros(x.len()),
            dt: 0.0,
        });
        assert!(bad.jet(&[0.0, 0.0], 0.0).is_err());
    }
}
