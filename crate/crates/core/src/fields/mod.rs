//! Height functions with value/gradient/Hessian access, base metrics with
//! their curvature, and the conformal factors of the ambient space.

mod adapters;
mod ambient;
mod analytic;
mod grid;
mod metric;

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::linalg::{is_finite_matrix, is_finite_vector};

pub use adapters::{FdSteps, FiniteDifference, FnField, Rotated, Scaled};
pub use ambient::{spherical_phi, AmbientSpec, ConformalFactor, PhiJet};
pub use analytic::{
    graded_exponents, Affine, Monomial, Polynomial, Quadratic, RadialField, RadialProfile, SphereCap,
    SumField, TrigSum, Wave,
};
pub use grid::GridField;
pub use metric::{curvature_from_derivatives, fd_matrix_derivatives, BaseMetric, MetricJet};

/// Value, gradient and Hessian of a height function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && is_finite_vector(&self.gradient) && is_finite_matrix(&self.hessian)
    }
}

/// Where a field may be queried.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Whole,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball about the origin.
    Ball { radius: f64 },
    /// `inner ≤ |x| < outer`.
    Annulus { inner: f64, outer: f64 },
}

impl Domain {
    /// Whether `x` lies in the domain with at least `margin` clearance from
    /// the boundary.
    pub fn contains(&self, x: &[f64], margin: f64) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l + margin && *v <= h - margin),
            Domain::Ball { radius } => norm(x) < radius - margin,
            Domain::Annulus { inner, outer } => {
                let r = norm(x);
                r >= inner + margin && r < outer - margin
            }
        }
    }

    /// A radius enclosing the domain, when bounded.
    pub fn extent(&self) -> Option<f64> {
        match self {
            Domain::Whole => None,
            Domain::Box { lo, hi } => Some(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| l.abs().max(h.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt(),
            ),
            Domain::Ball { radius } => Some(*radius),
            Domain::Annulus { outer, .. } => Some(*outer),
        }
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A height function `u : Ω ⊂ ℝⁿ → ℝ`.
///
/// Implementors supply the unchecked evaluations; callers use [`value`] and
/// [`jet`], which validate dimension, domain and finiteness.
///
/// [`value`]: ScalarField::value
/// [`jet`]: ScalarField::jet
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn domain(&self) -> Domain;

    fn value_at(&self, x: &[f64]) -> f64;

    fn jet_at(&self, x: &[f64]) -> Jet;

    /// Clearance required from the domain boundary for a query at `x`.
    fn margin(&self, _x: &[f64]) -> f64 {
        0.0
    }

    /// Whether the jets are closed-form (as opposed to finite differences).
    fn is_analytic(&self) -> bool {
        true
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.domain().contains(x, self.margin(x))
    }

    fn label(&self) -> String {
        format!("{self:?}")
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteInput("query point".into()));
        }
        if !self.contains(x) {
            return Err(GeomError::OutOfDomain { point: x.to_vec() });
        }
        Ok(())
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = self.value_at(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeomError::NonFiniteResult("field value"))
        }
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.check_point(x)?;
        let j = self.jet_at(x);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(GeomError::NonFiniteResult("field jet"))
        }
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        (**self).value_at(x)
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        (**self).jet_at(x)
    }
    fn margin(&self, x: &[f64]) -> f64 {
        (**self).margin(x)
    }
    fn is_analytic(&self) -> bool {
        (**self).is_analytic()
    }
    fn contains(&self, x: &[f64]) -> bool {
        (**self).contains(x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// Evaluates the jet of a field; the free-function form of [`ScalarField::jet`].
pub fn eval_jet(field: &dyn ScalarField, x: &[f64]) -> Result<Jet> {
    field.jet(x)
}

/// Evaluates curvature data of a base metric at `x`.
pub fn metric_jet(metric: &BaseMetric, x: &[f64]) -> Result<MetricJet> {
    metric.jet(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_membership() {
        let b = Domain::Ball { radius: 1.0 };
        assert!(b.contains(&[0.5, 0.5], 0.0));
        assert!(!b.contains(&[1.0, 0.0], 0.0));
        assert!(!b.contains(&[0.95, 0.0], 0.1));
        let a = Domain::Annulus { inner: 0.5, outer: 1.0 };
        assert!(a.contains(&[0.5, 0.0], 0.0));
        assert!(!a.contains(&[0.4, 0.0], 0.0));
        assert!(!a.contains(&[0.0, 1.0], 0.0));
        let bx = Domain::Box { lo: vec![-1.0, -1.0], hi: vec![1.0, 1.0] };
        assert!(bx.contains(&[1.0, -1.0], 0.0));
        assert!(!bx.contains(&[1.0, -1.0], 0.01));
    }
}
