//! Extrinsic geometry of a graph `t = u(x)` in the product `(N × ℝ, g + dt²)`.
//!
//! Conventions: the normal is the upward one, `ν = (−∇u, 1)/W` with
//! `W = √(1 + |∇u|²)`, and the shape operator in graph coordinates is
//! `A = (g + du⊗du)⁻¹ ∇²u / W` with the covariant Hessian of `g`. A convex-up
//! paraboloid therefore has positive mean curvature and a concave cap negative.
//!
//! Level sets `Σ = {u = ε}` carry the normal `η = −∇u/|∇u|`, which makes
//! `⟨ν, η⟩ = |∇u|/W` non-negative, and the shape operator
//! `A_Σ(X, Y) = ∇²u(X, Y)/|∇u|` on `∇u^⊥`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::fields::{fd_matrix_derivatives, BaseMetric, curvature_from_derivatives, Jet, MetricJet, ScalarField};
use crate::linalg::{self, max_abs};

/// Gradients below this norm are treated as critical for slicing purposes.
pub const DEFAULT_DELTA_REG: f64 = 1e-6;
/// Allowed `|u(x) − ε|` for a point to count as lying on the slice.
pub const DEFAULT_LEVEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicPoint {
    pub x: Vec<f64>,
    pub u: f64,
    /// Covariant gradient `u_i`.
    pub grad: DVector<f64>,
    /// Contravariant gradient `u^i = g^{ij} u_j`.
    pub grad_up: DVector<f64>,
    pub grad_norm: f64,
    pub w: f64,
    /// `(ν^1, …, ν^n, ν^t)` in coordinates.
    pub nu: DVector<f64>,
    /// `A^i_j`, row `i`, column `j`.
    pub a: DMatrix<f64>,
    pub induced_metric: DMatrix<f64>,
    /// `∇_j∇_k u`.
    pub covariant_hessian: DMatrix<f64>,
    pub h: f64,
    pub norm_a2: f64,
    /// Ascending.
    pub principal: Vec<f64>,
    /// Scalar curvature of the induced metric, from the Gauss equation.
    pub scalar_curvature: f64,
    pub metric: MetricJet,
}

impl ExtrinsicPoint {
    /// The same data for the downward normal: `A`, `H` and the principal
    /// curvatures change sign, the scalar curvature does not.
    pub fn flipped(&self) -> Self {
        let mut p = self.clone();
        p.nu = -&self.nu;
        p.a = -&self.a;
        p.h = -self.h;
        p.principal = self.principal.iter().rev().map(|v| -v).collect();
        p
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `Ric_g(ν′, ν′)` with `ν′` the base part of `ν`.
    pub fn ricci_nu_prime(&self) -> f64 {
        let n = self.dim();
        let nu_p = self.nu.rows(0, n).into_owned();
        linalg::bilinear(&self.metric.ricci, &nu_p, &nu_p)
    }

    /// `|ν|²` in the product metric.
    pub fn normal_norm2(&self) -> f64 {
        let n = self.dim();
        let nu_p = self.nu.rows(0, n).into_owned();
        linalg::bilinear(&self.metric.g, &nu_p, &nu_p) + self.nu[n] * self.nu[n]
    }
}

fn validate_dims(field: &dyn ScalarField, base: &BaseMetric) -> Result<usize> {
    let n = field.dim();
    if n == 0 {
        return Err(GeomError::InvalidDimension { got: n, reason: "graphs need n ≥ 1" });
    }
    if base.dim() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: base.dim() });
    }
    Ok(n)
}

/// Extrinsic data from already evaluated jets.
pub fn extrinsic_from_jets(x: &[f64], jet: &Jet, metric: MetricJet) -> Result<ExtrinsicPoint> {
    let n = x.len();
    let grad = jet.gradient.clone();
    let grad_up = &metric.g_inv * &grad;
    let grad_norm2 = grad.dot(&grad_up).max(0.0);
    let w = (1.0 + grad_norm2).sqrt();

    let mut nu = DVector::zeros(n + 1);
    for i in 0..n {
        nu[i] = -grad_up[i] / w;
    }
    nu[n] = 1.0 / w;

    let mut hess = jet.hessian.clone();
    for j in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for m in 0..n {
                s += metric.christoffel.get(m, j, k) * grad[m];
            }
            hess[(j, k)] -= s;
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;

    let induced = &metric.g + &grad * grad.transpose();
    let induced_inv = induced
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::NotPositiveDefinite { point: x.to_vec() })?;
    let a = &induced_inv * &hess / w;
    let principal = linalg::self_adjoint_eigenvalues(&a, &induced, x)?;
    let h = a.trace();
    let norm_a2 = (&a * &a).trace();

    let nu_p = nu.rows(0, n).into_owned();
    let ric_nu = linalg::bilinear(&metric.ricci, &nu_p, &nu_p);
    let scalar_curvature = h * h - norm_a2 + metric.scalar - 2.0 * ric_nu;

    let p = ExtrinsicPoint {
        x: x.to_vec(),
        u: jet.value,
        grad,
        grad_up,
        grad_norm: grad_norm2.sqrt(),
        w,
        nu,
        a,
        induced_metric: induced,
        covariant_hessian: hess,
        h,
        norm_a2,
        principal,
        scalar_curvature,
        metric,
    };
    if !(p.h.is_finite() && p.norm_a2.is_finite() && p.scalar_curvature.is_finite()) {
        return Err(GeomError::NonFiniteResult("extrinsic curvature"));
    }
    Ok(p)
}

pub fn extrinsic_point(field: &dyn ScalarField, base: &BaseMetric, x: &[f64]) -> Result<ExtrinsicPoint> {
    validate_dims(field, base)?;
    let jet = field.jet(x)?;
    let metric = base.jet(x)?;
    extrinsic_from_jets(x, &jet, metric)
}

/// Default stencil step for [`intrinsic_scalar_curvature`].
pub fn default_intrinsic_step(x: &[f64]) -> f64 {
    1e-3 * crate::fields::norm(x).max(1.0)
}

/// Scalar curvature of the induced metric `g_ij + u_i u_j`, computed from
/// its components by finite differences. Independent of the Gauss equation.
pub fn intrinsic_scalar_curvature(field: &dyn ScalarField, base: &BaseMetric, x: &[f64]) -> Result<f64> {
    intrinsic_scalar_curvature_with_step(field, base, x, default_intrinsic_step(x))
}

pub fn intrinsic_scalar_curvature_with_step(
    field: &dyn ScalarField,
    base: &BaseMetric,
    x: &[f64],
    step: f64,
) -> Result<f64> {
    let n = validate_dims(field, base)?;
    if !(step > 0.0) {
        return Err(GeomError::ParameterOutOfRange { name: "step", value: step, expected: "step > 0" });
    }
    field.check_point(x)?;
    // The stencil reaches 2h along each axis pair; every node must be queryable.
    for i in 0..n {
        for s in [-2.0, 2.0] {
            let mut y = x.to_vec();
            y[i] += s * step;
            field.check_point(&y)?;
        }
    }
    let induced = |y: &[f64]| {
        let j = field.jet_at(y);
        base.components(y) + &j.gradient * j.gradient.transpose()
    };
    let (g, dg, ddg) = fd_matrix_derivatives(induced, x, step);
    if !linalg::is_finite_matrix(&g) || dg.iter().any(|d| !linalg::is_finite_matrix(d)) {
        return Err(GeomError::NonFiniteResult("induced metric"));
    }
    let jet = curvature_from_derivatives(&g, &dg, &ddg, x)?;
    Ok(jet.scalar)
}

/// Options for [`level_slice`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOptions {
    pub delta_reg: f64,
    pub level_tol: f64,
}

impl Default for SliceOptions {
    fn default() -> Self {
        Self { delta_reg: DEFAULT_DELTA_REG, level_tol: DEFAULT_LEVEL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceFrame {
    pub eps: f64,
    pub x: Vec<f64>,
    /// Contravariant components of `η`.
    pub eta: DVector<f64>,
    /// `A_Σ` in the orthonormal basis `e₂, …, e_n` of the adapted frame.
    pub a_sigma: DMatrix<f64>,
    pub h_sigma: f64,
    /// Ascending eigenvalues of `A_Σ`.
    pub principal_sigma: Vec<f64>,
    pub cos_angle: f64,
    /// `(A|1)`: the lower-right block of `A` in the adapted chart.
    pub minor: DMatrix<f64>,
    /// Columns `e₁ = ∇u/|∇u|, e₂, …, e_n`, orthonormal for `g` at `x`.
    pub frame: DMatrix<f64>,
    pub grad_norm: f64,
    pub w: f64,
}

/// Result of slicing at a point: either a regular frame, or a critical point
/// of `u` where `∇u = 0` exactly and the slice normal is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum SliceOutcome {
    Regular(SliceFrame),
    Critical { x: Vec<f64>, eps: f64 },
}

impl SliceOutcome {
    pub fn regular(self) -> Result<SliceFrame> {
        match self {
            SliceOutcome::Regular(f) => Ok(f),
            SliceOutcome::Critical { .. } => Err(GeomError::NonRegularPoint {
                grad_norm: 0.0,
                threshold: DEFAULT_DELTA_REG,
            }),
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, SliceOutcome::Regular(_))
    }
}

/// The frame `e₁ = ∇u♯/|∇u|` completed by Gram–Schmidt in `g` over the
/// coordinate axes, skipping the axis most aligned with `e₁` (ties go to the
/// smallest index).
pub fn adapted_frame(g: &DMatrix<f64>, grad_up: &DVector<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let gnorm = linalg::bilinear(g, grad_up, grad_up).sqrt();
    let e1 = grad_up / gnorm;
    let mut skip = 0;
    let mut best = -1.0;
    for k in 0..n {
        // g(e₁, ∂_k)/|∂_k|
        let align = (g.row(k) * &e1)[(0, 0)].abs() / g[(k, k)].sqrt();
        if align > best + 1e-14 {
            best = align;
            skip = k;
        }
    }
    let mut cols: Vec<DVector<f64>> = vec![e1];
    for k in (0..n).filter(|&k| k != skip) {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        for c in &cols {
            let proj = linalg::bilinear(g, c, &v);
            v -= c * proj;
        }
        let len = linalg::bilinear(g, &v, &v).sqrt();
        cols.push(v / len);
    }
    DMatrix::from_columns(&cols)
}

/// Lower-right `(n−1)×(n−1)` block of `E⁻¹ M E`.
pub fn adapted_minor(m: &DMatrix<f64>, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(linalg::drop_first(&adapted_matrix(m, frame)?))
}

/// `E⁻¹ M E`: a mixed tensor in the adapted chart.
pub fn adapted_matrix(m: &DMatrix<f64>, frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = frame
        .clone()
        .try_inverse()
        .ok_or(GeomError::NonFiniteResult("adapted frame inverse"))?;
    Ok(&inv * m * frame)
}

pub fn level_slice(field: &dyn ScalarField, base: &BaseMetric, eps: f64, x: &[f64]) -> Result<SliceOutcome> {
    level_slice_with(field, base, eps, x, SliceOptions::default())
}

pub fn level_slice_with(
    field: &dyn ScalarField,
    base: &BaseMetric,
    eps: f64,
    x: &[f64],
    opts: SliceOptions,
) -> Result<SliceOutcome> {
    let point = extrinsic_point(field, base, x)?;
    slice_from_point(&point, eps, opts)
}

/// Slice data at a point whose extrinsic data is already known.
pub fn slice_from_point(point: &ExtrinsicPoint, eps: f64, opts: SliceOptions) -> Result<SliceOutcome> {
    let n = point.dim();
    if n < 2 {
        return Err(GeomError::InvalidDimension { got: n, reason: "level sets need n ≥ 2" });
    }
    let off = (point.u - eps).abs();
    if off > opts.level_tol * eps.abs().max(1.0) {
        return Err(GeomError::OffLevel(off));
    }
    if point.grad_norm == 0.0 {
        return Ok(SliceOutcome::Critical { x: point.x.clone(), eps });
    }
    if point.grad_norm < opts.delta_reg {
        return Err(GeomError::NonRegularPoint { grad_norm: point.grad_norm, threshold: opts.delta_reg });
    }
    let g = &point.metric.g;
    let frame = adapted_frame(g, &point.grad_up);
    let tangent = frame.columns(1, n - 1).into_owned();
    let a_sigma = tangent.transpose() * &point.covariant_hessian * &tangent / point.grad_norm;
    let a_sigma = (&a_sigma + a_sigma.transpose()) * 0.5;
    let principal_sigma = linalg::symmetric_eigenvalues(&a_sigma);
    let minor = adapted_minor(&point.a, &frame)?;
    Ok(SliceOutcome::Regular(SliceFrame {
        eps,
        x: point.x.clone(),
        eta: -&point.grad_up / point.grad_norm,
        h_sigma: a_sigma.trace(),
        a_sigma,
        principal_sigma,
        cos_angle: point.grad_norm / point.w,
        minor,
        frame,
        grad_norm: point.grad_norm,
        w: point.w,
    }))
}

/// `max |(A|1) − ⟨ν,η⟩ A_Σ|`, with `(A|1)` recomputed from `point.a` in the
/// frame's adapted chart.
pub fn minor_relation_residual(frame: &SliceFrame, point: &ExtrinsicPoint) -> Result<f64> {
    let n = point.dim();
    if frame.x.len() != n || frame.a_sigma.nrows() + 1 != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: frame.x.len() });
    }
    let dist = frame.x.iter().zip(&point.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if dist > 1e-12 * crate::fields::norm(&point.x).max(1.0) {
        return Err(GeomError::PreconditionViolated(format!(
            "slice frame and extrinsic point are {dist:e} apart"
        )));
    }
    let minor = adapted_minor(&point.a, &frame.frame)?;
    Ok(max_abs(&(minor - &frame.a_sigma * frame.cos_angle)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Affine, Quadratic, Rotated, SphereCap};
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn flat2() -> BaseMetric {
        BaseMetric::flat(2)
    }

    #[test]
    fn plane_is_totally_geodesic() {
        let p = extrinsic_point(&Affine::constant(2, 0.0), &flat2(), &[0.3, 0.4]).unwrap();
        assert_eq!(max_abs(&p.a), 0.0);
        assert_eq!(p.h, 0.0);
        assert_eq!(p.scalar_curvature, 0.0);
    }

    #[test]
    fn paraboloid_worked_example() {
        let p = extrinsic_point(&Quadratic::paraboloid(2), &flat2(), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(p.a[(0, 0)], 1.0 / (2.0 * SQRT_2), epsilon = 1e-15);
        assert_relative_eq!(p.a[(1, 1)], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_eq!(p.a[(0, 1)], 0.0);
        assert_relative_eq!(p.h, 3.0 / (2.0 * SQRT_2), epsilon = 1e-15);
        assert_relative_eq!(p.scalar_curvature, 0.5, epsilon = 1e-14);
        assert_relative_eq!(p.normal_norm2(), 1.0, epsilon = 1e-12);
        assert!(p.nu[2] > 0.0);
    }

    #[test]
    fn sphere_cap_curvatures() {
        for r in [0.5, 1.0, 2.0] {
            let cap = SphereCap { n: 2, radius: r, center_height: 0.0, upper: true };
            let p = extrinsic_point(&cap, &flat2(), &[0.1 * r, -0.2 * r]).unwrap();
            for k in &p.principal {
                assert_relative_eq!(*k, -1.0 / r, epsilon = 1e-12);
            }
            assert_relative_eq!(p.scalar_curvature, 2.0 / (r * r), epsilon = 1e-12);
        }
    }

    #[test]
    fn trace_and_norm_match_eigenvalues() {
        let q = Quadratic { weights: vec![1.0, 2.0, -3.0] };
        let p = extrinsic_point(&q, &BaseMetric::flat(3), &[0.2, -0.4, 0.1]).unwrap();
        let sum: f64 = p.principal.iter().sum();
        let sq: f64 = p.principal.iter().map(|v| v * v).sum();
        assert_relative_eq!(p.h, sum, epsilon = 1e-12);
        assert_relative_eq!(p.norm_a2, sq, epsilon = 1e-12);
    }

    #[test]
    fn intrinsic_curvature_examples() {
        let zero = intrinsic_scalar_curvature(&Affine::constant(2, 0.0), &flat2(), &[0.1, 0.1]).unwrap();
        assert!(zero.abs() < 1e-12);
        let par = intrinsic_scalar_curvature(&Quadratic::paraboloid(2), &flat2(), &[1.0, 0.0]).unwrap();
        assert!((par - 0.5).abs() < 1e-4, "{par}");
        let cap = SphereCap { n: 2, radius: 2.0, center_height: 0.0, upper: true };
        let r = intrinsic_scalar_curvature(&cap, &flat2(), &[0.3, 0.5]).unwrap();
        assert!((r - 0.5).abs() < 1e-4, "{r}");
    }

    #[test]
    fn intrinsic_matches_gauss_over_round_sphere_base() {
        let q = Quadratic { weights: vec![0.7, -0.4] };
        let base = BaseMetric::round_sphere(2);
        let x = [0.3, 0.2];
        let p = extrinsic_point(&q, &base, &x).unwrap();
        let r = intrinsic_scalar_curvature(&q, &base, &x).unwrap();
        assert!((p.scalar_curvature - r).abs() < 2e-3, "{} vs {}", p.scalar_curvature, r);
    }

    #[test]
    fn paraboloid_slice_worked_example() {
        let s = level_slice(&Quadratic::paraboloid(2), &flat2(), 0.5, &[1.0, 0.0]).unwrap().regular().unwrap();
        assert_relative_eq!(s.cos_angle, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(s.h_sigma, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.minor[(0, 0)], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_eq!(s.eta.as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn cap_slice_is_circle() {
        let cap = SphereCap::hemisphere(2);
        let c = 1.0 / SQRT_2;
        let x = [c * 0.6, c * 0.8];
        let s = level_slice(&cap, &flat2(), c, &x).unwrap().regular().unwrap();
        assert_relative_eq!(s.cos_angle, c, epsilon = 1e-12);
        // The cap decreases outward, so η points outward and the circle
        // curves away from it.
        assert_relative_eq!(s.h_sigma.abs(), SQRT_2, epsilon = 1e-12);
        let p = extrinsic_point(&cap, &flat2(), &x).unwrap();
        assert!(minor_relation_residual(&s, &p).unwrap() < 1e-12);
    }

    #[test]
    fn constant_level_is_critical() {
        let out = level_slice(&Affine::constant(2, 0.25), &flat2(), 0.25, &[0.1, 0.2]).unwrap();
        assert!(matches!(out, SliceOutcome::Critical { .. }));
        assert!(matches!(out.regular(), Err(GeomError::NonRegularPoint { .. })));
    }

    #[test]
    fn tiny_gradient_is_rejected() {
        let f = Affine { constant: 0.0, slope: vec![1e-9, 0.0] };
        let r = level_slice(&f, &flat2(), 1e-10, &[0.1, 0.0]);
        assert!(matches!(r, Err(GeomError::NonRegularPoint { .. })));
    }

    #[test]
    fn off_level_is_rejected() {
        let r = level_slice(&Quadratic::paraboloid(2), &flat2(), 0.4, &[1.0, 0.0]);
        assert!(matches!(r, Err(GeomError::OffLevel(_))));
    }

    #[test]
    fn adapted_frame_is_orthonormal_and_tie_breaks() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]);
        let grad = DVector::from_column_slice(&[0.2, -0.5, 0.7]);
        let e = adapted_frame(&g, &grad);
        let gram = e.transpose() * &g * &e;
        assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-12);
        // Axis-aligned: the skipped axis is the aligned one; remaining axes
        // come out in index order.
        let e = adapted_frame(&DMatrix::identity(3, 3), &DVector::from_column_slice(&[0.0, 2.0, 0.0]));
        assert_eq!(e.column(1).as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(e.column(2).as_slice(), &[0.0, 0.0, 1.0]);
        // Equal alignment: the smallest index is skipped.
        let e = adapted_frame(&DMatrix::identity(2, 2), &DVector::from_column_slice(&[1.0, 1.0]));
        assert_relative_eq!(e[(0, 1)], -1.0 / SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(e[(1, 1)], 1.0 / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn minor_relation_on_anisotropic_field_over_curved_base() {
        let q = Quadratic { weights: vec![1.0, 4.0, 9.0] };
        let base = BaseMetric::round_sphere(3);
        let x = [0.3, -0.2, 0.25];
        let p = extrinsic_point(&q, &base, &x).unwrap();
        let s = slice_from_point(&p, p.u, SliceOptions::default()).unwrap().regular().unwrap();
        assert!(minor_relation_residual(&s, &p).unwrap() < 1e-10);
        assert_relative_eq!(s.minor.trace(), s.cos_angle * s.h_sigma, epsilon = 1e-10);
    }

    #[test]
    fn rotation_invariance() {
        let q = Quadratic { weights: vec![1.0, 3.0] };
        let (sn, cs) = 0.4f64.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]);
        let y = DVector::from_column_slice(&[0.3, -0.6]);
        let x = rot.transpose() * &y;
        let a = extrinsic_point(&q, &flat2(), y.as_slice()).unwrap();
        let b = extrinsic_point(&Rotated::new(q, rot), &flat2(), x.as_slice()).unwrap();
        assert_relative_eq!(a.h, b.h, epsilon = 1e-12);
        assert_relative_eq!(a.norm_a2, b.norm_a2, epsilon = 1e-12);
        assert_relative_eq!(a.scalar_curvature, b.scalar_curvature, epsilon = 1e-12);
    }

    #[test]
    fn flipping_the_normal() {
        let p = extrinsic_point(&Quadratic { weights: vec![1.0, -2.0] }, &flat2(), &[0.4, 0.1]).unwrap();
        let f = p.flipped();
        assert_eq!(f.h, -p.h);
        assert_eq!(f.a, -&p.a);
        assert_eq!(f.scalar_curvature, p.scalar_curvature);
        assert_relative_eq!(f.principal[0], -p.principal[1]);
    }
}
