//! Extrinsic geometry after a conformal change `ḡ = φ⁻²(g + dt²)`.
//!
//! With `μ = dφ(ν)` taken against the product-metric unit normal, the shape
//! operator becomes `Ā = φA + μ I` and the mean curvature `H̄ = φH + nμ`.
//! Slices transform the same way: `Ā_Σ = φA_Σ + η(φ) I`.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::fields::{AmbientSpec, BaseMetric, PhiJet, ScalarField};
use crate::graphgeom::{self, ExtrinsicPoint, SliceFrame};
use crate::linalg::{self, max_abs};

/// `φA + μ I`.
pub fn conformal_shape(point: &ExtrinsicPoint, phi: f64, mu: f64) -> Result<DMatrix<f64>> {
    if !(phi > 0.0) {
        return Err(GeomError::NonPositiveFactor(phi));
    }
    let n = point.dim();
    Ok(&point.a * phi + DMatrix::identity(n, n) * mu)
}

/// `dφ(ν) = (−u^i ∂_iφ + φ_t)/W`.
pub fn normal_derivative(point: &ExtrinsicPoint, phi: &PhiJet) -> f64 {
    (-point.grad_up.dot(&phi.grad_x) + phi.dt) / point.w
}

/// `η(φ) = −u^i ∂_iφ/|∇u|`.
pub fn slice_normal_derivative(frame: &SliceFrame, phi: &PhiJet) -> f64 {
    frame.eta.dot(&phi.grad_x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalExtrinsicPoint {
    pub underlying: ExtrinsicPoint,
    pub phi: PhiJet,
    pub mu: f64,
    pub a_bar: DMatrix<f64>,
    pub h_bar: f64,
    pub norm_a_bar2: f64,
    /// Ascending.
    pub principal_bar: Vec<f64>,
    /// Scalar curvature of the graph in the round-sphere ambient; `None` for
    /// other conformal factors.
    pub scalar_curvature_bar: Option<f64>,
}

pub fn conformal_from_point(point: ExtrinsicPoint, phi: PhiJet, round_sphere: bool) -> Result<ConformalExtrinsicPoint> {
    let n = point.dim();
    let mu = normal_derivative(&point, &phi);
    let a_bar = conformal_shape(&point, phi.value, mu)?;
    let h_bar = phi.value * point.h + n as f64 * mu;
    let norm_a_bar2 = (&a_bar * &a_bar).trace();
    let principal_bar = point.principal.iter().map(|k| phi.value * k + mu).collect();
    let nf = n as f64;
    let scalar_curvature_bar = round_sphere.then_some(h_bar * h_bar - norm_a_bar2 + nf * (nf - 1.0));
    Ok(ConformalExtrinsicPoint {
        underlying: point,
        phi,
        mu,
        a_bar,
        h_bar,
        norm_a_bar2,
        principal_bar,
        scalar_curvature_bar,
    })
}

/// Extrinsic data of the graph of `u` in the ambient `φ⁻²(g + dt²)`, with `φ`
/// evaluated at `(x, u(x))`.
pub fn conformal_point(field: &dyn ScalarField, ambient: &AmbientSpec, x: &[f64]) -> Result<ConformalExtrinsicPoint> {
    let point = graphgeom::extrinsic_point(field, &ambient.base, x)?;
    let phi = ambient.phi(x, point.u)?;
    conformal_from_point(point, phi, ambient.is_round_sphere())
}

/// Mean curvature of the graph in the round sphere, straight from the
/// closed-form operator on the flat base:
/// `φ Σ(δ_ij − u_i u_j/W²) u_ij / W + n (u − x·Du)/W`, `φ = (1 + |x|² + u²)/2`.
pub fn h_spherical(field: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let j = field.jet(x)?;
    let n = x.len();
    let du = &j.gradient;
    let w2 = 1.0 + du.norm_squared();
    let w = w2.sqrt();
    let mut elliptic = 0.0;
    for a in 0..n {
        for b in 0..n {
            let delta = if a == b { 1.0 } else { 0.0 };
            elliptic += (delta - du[a] * du[b] / w2) * j.hessian[(a, b)];
        }
    }
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let phi = 0.5 * (1.0 + x2 + j.value * j.value);
    let radial: f64 = x.iter().zip(du.iter()).map(|(a, b)| a * b).sum();
    Ok(phi * elliptic / w + n as f64 * (j.value - radial) / w)
}

/// The Euclidean mean curvature operator `Σ(δ_ij − u_i u_j/W²) u_ij / W`.
pub fn h_euclidean(field: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let j = field.jet(x)?;
    let n = x.len();
    let du = &j.gradient;
    let w2 = 1.0 + du.norm_squared();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            let delta = if a == b { 1.0 } else { 0.0 };
            s += (delta - du[a] * du[b] / w2) * j.hessian[(a, b)];
        }
    }
    Ok(s / w2.sqrt())
}

/// Both sides of the conformal minor relation at a slice point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSliceTrace {
    /// `(Ā|1)` computed from `Ā` in the adapted chart.
    pub minor_bar: DMatrix<f64>,
    /// `⟨ν,η⟩ Ā_Σ + ⟨ν,∂_t⟩ φ_t I`.
    pub predicted: DMatrix<f64>,
    pub a_sigma_bar: DMatrix<f64>,
    pub h_sigma_bar: f64,
    /// `σ₁(Ā|1)`.
    pub trace_bar: f64,
    /// `⟨ν,η⟩ H̄_Σ + (n−1)⟨ν,∂_t⟩ φ_t`.
    pub trace_predicted: f64,
    pub eta_phi: f64,
    pub residual: f64,
}

pub fn conformal_slice_trace(frame: &SliceFrame, point: &ExtrinsicPoint, phi: &PhiJet) -> Result<ConformalSliceTrace> {
    let n = point.dim();
    if frame.x.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: frame.x.len() });
    }
    if frame.grad_norm <= 0.0 {
        return Err(GeomError::NonRegularPoint { grad_norm: frame.grad_norm, threshold: graphgeom::DEFAULT_DELTA_REG });
    }
    let mu = normal_derivative(point, phi);
    let a_bar = conformal_shape(point, phi.value, mu)?;
    let minor_bar = graphgeom::adapted_minor(&a_bar, &frame.frame)?;
    let eta_phi = slice_normal_derivative(frame, phi);
    let id = DMatrix::identity(n - 1, n - 1);
    let a_sigma_bar = &frame.a_sigma * phi.value + &id * eta_phi;
    let nu_t = 1.0 / point.w;
    let predicted = &a_sigma_bar * frame.cos_angle + &id * (nu_t * phi.dt);
    let h_sigma_bar = a_sigma_bar.trace();
    let residual = max_abs(&(&minor_bar - &predicted));
    Ok(ConformalSliceTrace {
        trace_bar: minor_bar.trace(),
        trace_predicted: frame.cos_angle * h_sigma_bar + (n as f64 - 1.0) * nu_t * phi.dt,
        minor_bar,
        predicted,
        a_sigma_bar,
        h_sigma_bar,
        eta_phi,
        residual,
    })
}

/// Mean curvature of the level set `{u = ε}` through `x`, inside the slice
/// `{t = ε}` of the conformal ambient, for the normal `η`:
/// `H̄_Σ = φ H_Σ + (n−1) η(φ)`.
pub fn conformal_slice_mean_curvature(field: &dyn ScalarField, ambient: &AmbientSpec, eps: f64, x: &[f64]) -> Result<f64> {
    let frame = graphgeom::level_slice(field, &ambient.base, eps, x)?.regular()?;
    let phi = ambient.phi(x, eps)?;
    let n = x.len() as f64;
    Ok(phi.value * frame.h_sigma + (n - 1.0) * slice_normal_derivative(&frame, &phi))
}

/// Principal curvatures of the slice in the conformal ambient, ascending.
pub fn conformal_slice_principal(frame: &SliceFrame, phi: &PhiJet) -> Vec<f64> {
    let e = slice_normal_derivative(frame, phi);
    frame.principal_sigma.iter().map(|k| phi.value * k + e).collect()
}

/// Eigenvalues of `Ā` computed from scratch through the induced metric, as
/// an independent check of the shifted eigenvalues.
pub fn conformal_principal_direct(p: &ConformalExtrinsicPoint) -> Result<Vec<f64>> {
    linalg::self_adjoint_eigenvalues(&p.a_bar, &p.underlying.induced_metric, &p.underlying.x)
}

/// Shorthand for the flat base with the spherical factor.
pub fn round_sphere_point(field: &dyn ScalarField, x: &[f64]) -> Result<ConformalExtrinsicPoint> {
    conformal_point(field, &AmbientSpec::round_sphere(field.dim()), x)
}

/// Shorthand for the Euclidean product (no conformal factor).
pub fn euclidean_point(field: &dyn ScalarField, x: &[f64]) -> Result<ExtrinsicPoint> {
    graphgeom::extrinsic_point(field, &BaseMetric::flat(field.dim()), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Affine, ConformalFactor, Quadratic, SphereCap, SumField};
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    #[test]
    fn unit_factor_is_identity() {
        let q = Quadratic { weights: vec![1.0, 2.0] };
        let p = euclidean_point(&q, &[0.3, 0.1]).unwrap();
        let a = conformal_shape(&p, 1.0, 0.0).unwrap();
        assert_eq!(a, p.a);
        let amb = AmbientSpec::conformal(BaseMetric::flat(2), ConformalFactor::Constant(1.0));
        let c = conformal_point(&q, &amb, &[0.3, 0.1]).unwrap();
        assert_eq!(c.h_bar, p.h);
    }

    #[test]
    fn totally_geodesic_input_becomes_umbilic() {
        let p = euclidean_point(&Affine::constant(2, 0.0), &[0.2, 0.2]).unwrap();
        let a = conformal_shape(&p, 3.0, 0.7).unwrap();
        assert_eq!(a, DMatrix::identity(2, 2) * 0.7);
        assert!(conformal_shape(&p, 0.0, 0.7).is_err());
    }

    #[test]
    fn constant_factor_scales() {
        let q = Quadratic { weights: vec![1.0, -2.0, 0.5] };
        let amb = AmbientSpec::conformal(BaseMetric::flat(3), ConformalFactor::Constant(2.5));
        let c = conformal_point(&q, &amb, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(c.a_bar, &c.underlying.a * 2.5);
        assert_eq!(c.h_bar, 2.5 * c.underlying.h);
    }

    #[test]
    fn hemisphere_is_a_great_sphere() {
        let cap = SphereCap::hemisphere(2);
        for x in [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.6]] {
            let c = round_sphere_point(&cap, &x).unwrap();
            assert_relative_eq!(c.mu, 1.0, epsilon = 1e-12);
            assert_relative_eq!(c.phi.value, 1.0, epsilon = 1e-12);
            assert!(max_abs(&c.a_bar) < 1e-12);
            assert!(c.h_bar.abs() < 1e-12);
            assert!(h_spherical(&cap, &x).unwrap().abs() < 1e-12);
            assert_relative_eq!(c.scalar_curvature_bar.unwrap(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spherical_operator_matches_conformal_route() {
        let cap = SphereCap { n: 2, radius: 0.7, center_height: 0.3, upper: true };
        for x in [[0.0, 0.0], [0.2, -0.1]] {
            let a = h_spherical(&cap, &x).unwrap();
            let b = round_sphere_point(&cap, &x).unwrap().h_bar;
            assert!(a.abs() > 1e-3);
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn euclidean_operator_examples() {
        assert_eq!(h_euclidean(&Affine::constant(2, 0.0), &[0.1, 0.1]).unwrap(), 0.0);
        assert_relative_eq!(
            h_euclidean(&Quadratic::paraboloid(2), &[1.0, 0.0]).unwrap(),
            3.0 / (2.0 * SQRT_2),
            epsilon = 1e-15
        );
        assert_relative_eq!(h_euclidean(&SphereCap::hemisphere(2), &[0.3, 0.4]).unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn slice_trace_identity_paraboloid() {
        let q = Quadratic::paraboloid(2);
        let p = euclidean_point(&q, &[1.0, 0.0]).unwrap();
        let f = graphgeom::slice_from_point(&p, 0.5, Default::default()).unwrap().regular().unwrap();
        let phi = ConformalFactor::Spherical.jet(&[1.0, 0.0], 0.5).unwrap();
        let t = conformal_slice_trace(&f, &p, &phi).unwrap();
        assert!(t.residual < 1e-12);
        assert_relative_eq!(t.trace_bar, t.trace_predicted, epsilon = 1e-12);
    }

    #[test]
    fn slice_trace_unit_factor_reduces() {
        let q = Quadratic { weights: vec![1.0, 3.0, 2.0] };
        let x = [0.2, 0.3, -0.1];
        let p = euclidean_point(&q, &x).unwrap();
        let f = graphgeom::slice_from_point(&p, p.u, Default::default()).unwrap().regular().unwrap();
        let phi = ConformalFactor::Constant(1.0).jet(&x, p.u).unwrap();
        let t = conformal_slice_trace(&f, &p, &phi).unwrap();
        assert!(max_abs(&(&t.minor_bar - &f.minor)) < 1e-15);
        assert!(max_abs(&(&t.predicted - &f.a_sigma * f.cos_angle)) < 1e-12);
    }

    #[test]
    fn hemisphere_slice_minor_vanishes() {
        let cap = SphereCap::hemisphere(2);
        let x = [0.5, 0.5];
        let p = euclidean_point(&cap, &x).unwrap();
        let f = graphgeom::slice_from_point(&p, p.u, Default::default()).unwrap().regular().unwrap();
        let phi = ConformalFactor::Spherical.jet(&x, p.u).unwrap();
        let t = conformal_slice_trace(&f, &p, &phi).unwrap();
        assert!(max_abs(&t.minor_bar) < 1e-12);
        assert!(max_abs(&t.predicted) < 1e-12);
    }

    #[test]
    fn coordinate_sphere_in_round_slice() {
        // Level set |x| = r of a shifted paraboloid at height ε.
        for (r, eps, n) in [(0.5, 0.0, 2usize), (0.5, 0.5, 3), (0.8, -0.3, 2)] {
            let f = SumField {
                parts: vec![Box::new(Quadratic::paraboloid(n)), Box::new(Affine::constant(n, eps - 0.5 * r * r))],
            };
            let mut x = vec![0.0; n];
            x[0] = r;
            let h = conformal_slice_mean_curvature(&f, &AmbientSpec::round_sphere(n), eps, &x).unwrap();
            let expected = (n as f64 - 1.0) / r * (1.0 + eps * eps - r * r) / 2.0;
            assert_relative_eq!(h, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn shifted_eigenvalues_match_direct() {
        let q = Quadratic { weights: vec![1.0, 3.0, -2.0] };
        let c = round_sphere_point(&q, &[0.3, -0.2, 0.4]).unwrap();
        let direct = conformal_principal_direct(&c).unwrap();
        for (a, b) in direct.iter().zip(&c.principal_bar) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_relative_eq!(c.a_bar.trace(), c.h_bar, epsilon = 1e-12);
    }
}
