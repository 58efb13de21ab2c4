//! The cone barrier `ψ_λ(x) = λ(1 − |x|)` slid down onto a height function on
//! an annulus, and the two curvature bounds compared at the touching point.
//!
//! The slide is discrete: `u` is sampled on a radial × angular product grid
//! over the shrunken annulus `a′ ≤ |x| < 1`, the first-touch slope is found by
//! bisection on `λ`, and the touching point is then refined along its ray by
//! golden-section search on `u/(1 − |x|)`. An interior maximum of that ratio
//! gives `D_r u = −λ` exactly, which is the gradient bound the comparison
//! needs. The result is a sampled certificate, not a proof that no finer
//! first touch exists.

use std::sync::Arc;

use serde::Serialize;

use crate::conformal;
use crate::error::{GeomError, Result};
use crate::fields::{norm, Affine, AmbientSpec, Domain, Quadratic, RadialField, RadialProfile, ScalarField, SumField};
use crate::graphgeom::DEFAULT_DELTA_REG;
use crate::par::{map_indexed, Execution};
use crate::sampling::sphere_directions;

pub fn barrier_value(lambda: f64, x: &[f64]) -> f64 {
    lambda * (1.0 - norm(x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierOptions {
    pub radial: usize,
    /// Angular samples for `n = 2`, low-discrepancy directions otherwise.
    pub angular: usize,
    pub bisect_tol: f64,
    pub touch_tol: f64,
    /// Slack for the gradient bound at the touching point.
    pub gradient_tol: f64,
    pub exec: Execution,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            radial: 512,
            angular: 128,
            bisect_tol: 1e-10,
            touch_tol: 1e-8,
            gradient_tol: 1e-6,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingCertificate {
    pub radial: usize,
    pub directions: usize,
    pub samples: usize,
    pub bisect_tol: f64,
    pub touch_tol: f64,
    pub bisect_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierRun {
    pub n: usize,
    pub a: f64,
    pub a_prime: f64,
    pub lambda_max: f64,
    pub lambda_star: f64,
    pub x0: Vec<f64>,
    pub radius_x0: f64,
    pub u_x0: f64,
    pub psi_x0: f64,
    pub grad_norm_x0: f64,
    /// `D_r u(x₀)`.
    pub radial_derivative_x0: f64,
    /// `max (u − ψ_{λ*})` over the samples.
    pub max_violation: f64,
    /// `ψ_{λ_max} ≥ u` at every sample.
    pub start_ok: bool,
    /// The touch lies strictly inside the sampled radial range.
    pub interior: bool,
    /// `max u = 0`: the barrier comes down to `λ = 0` without a positive touch.
    pub degenerate: bool,
    /// `|Du| ≥ |D_r u| ≥ λ* − tol` at `x₀`.
    pub gradient_bound_holds: bool,
    pub successful: bool,
    pub certificate: SamplingCertificate,
}

/// Pushes `ψ_λ` down from `λ_max` onto `u` over `a′ ≤ |x| < 1`.
pub fn slide(field: &dyn ScalarField, a: f64, a_prime: f64, lambda_max: f64, opts: &BarrierOptions) -> Result<BarrierRun> {
    let n = field.dim();
    if !(0.0..1.0).contains(&a) {
        return Err(GeomError::ParameterOutOfRange { name: "a", value: a, expected: "0 ≤ a < 1" });
    }
    if !(a_prime > a && a_prime < 1.0) {
        return Err(GeomError::EmptyDomain(format!("need a < a′ < 1, got a = {a}, a′ = {a_prime}")));
    }
    if !(lambda_max >= 0.0 && lambda_max.is_finite()) {
        return Err(GeomError::ParameterOutOfRange { name: "lambda_max", value: lambda_max, expected: "finite, ≥ 0" });
    }
    if opts.radial < 3 || opts.angular == 0 {
        return Err(GeomError::EmptyDomain("barrier grid needs ≥ 3 radii and ≥ 1 direction".into()));
    }
    let dirs = sphere_directions(n, opts.angular);
    let radii: Vec<f64> = (0..opts.radial).map(|i| a_prime + (1.0 - a_prime) * i as f64 / opts.radial as f64).collect();
    let nd = dirs.len();
    let point = |i: usize, j: usize| -> Vec<f64> { dirs[j].iter().map(|d| radii[i] * d).collect() };

    let rows: Vec<Result<Vec<f64>>> = map_indexed(opts.exec, radii.len(), |i| (0..nd).map(|j| field.value(&point(i, j))).collect());
    let mut values = Vec::with_capacity(radii.len() * nd);
    for r in rows {
        values.extend(r?);
    }
    let gap_one = |k: usize| 1.0 - radii[k / nd];
    let max_u = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_u < 0.0 {
        return Err(GeomError::NoTouch(max_u));
    }
    let violation = |lambda: f64| -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (k, u) in values.iter().enumerate() {
            let d = u - lambda * gap_one(k);
            if d > best.0 {
                best = (d, k);
            }
        }
        best
    };
    let start_ok = violation(lambda_max).0 <= 0.0;
    let mut certificate = SamplingCertificate {
        radial: opts.radial,
        directions: nd,
        samples: values.len(),
        bisect_tol: opts.bisect_tol,
        touch_tol: opts.touch_tol,
        bisect_iterations: 0,
    };

    if max_u == 0.0 {
        let k = values.iter().position(|v| *v == 0.0).unwrap_or(0);
        let x0 = point(k / nd, k % nd);
        let j = field.jet(&x0)?;
        let r0 = norm(&x0);
        return Ok(BarrierRun {
            n,
            a,
            a_prime,
            lambda_max,
            lambda_star: 0.0,
            radial_derivative_x0: radial_derivative(&j.gradient, &x0),
            grad_norm_x0: j.gradient.norm(),
            radius_x0: r0,
            x0,
            u_x0: 0.0,
            psi_x0: 0.0,
            max_violation: violation(0.0).0,
            start_ok,
            interior: false,
            degenerate: true,
            gradient_bound_holds: false,
            successful: false,
            certificate,
        });
    }

    let (mut lo, mut hi) = (0.0, lambda_max);
    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if violation(mid).0 <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        certificate.bisect_iterations += 1;
    }
    let (_, k0) = violation(hi);
    let (i0, j0) = (k0 / nd, k0 % nd);
    let interior_index = i0 >= 1 && i0 + 1 < radii.len();

    // Golden-section refinement of u/(1 − r) along the ray of the sampled touch.
    let dir = &dirs[j0];
    let ratio = |r: f64| -> Result<f64> {
        let x: Vec<f64> = dir.iter().map(|d| r * d).collect();
        Ok(field.value(&x)? / (1.0 - r))
    };
    let (mut lo_r, mut hi_r) = (radii[i0.saturating_sub(1)], radii[(i0 + 1).min(radii.len() - 1)]);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi_r - golden * (hi_r - lo_r);
    let mut d = lo_r + golden * (hi_r - lo_r);
    let (mut fc, mut fd) = (ratio(c)?, ratio(d)?);
    while hi_r - lo_r > 1e-13 {
        if fc >= fd {
            hi_r = d;
            d = c;
            fd = fc;
            c = hi_r - golden * (hi_r - lo_r);
            fc = ratio(c)?;
        } else {
            lo_r = c;
            c = d;
            fc = fd;
            d = lo_r + golden * (hi_r - lo_r);
            fd = ratio(d)?;
        }
    }
    let mut r_star = 0.5 * (lo_r + hi_r);
    let mut lambda_star = ratio(r_star)?;
    if lambda_star < ratio(radii[i0])? {
        r_star = radii[i0];
        lambda_star = ratio(r_star)?;
    }
    let x0: Vec<f64> = dir.iter().map(|d| r_star * d).collect();
    let jet = field.jet(&x0)?;
    let grad_norm = jet.gradient.norm();
    let dr = radial_derivative(&jet.gradient, &x0);
    let psi = barrier_value(lambda_star, &x0);
    let interior = interior_index && r_star > radii[0] && r_star < radii[radii.len() - 1];
    let gradient_bound_holds = grad_norm + 1e-12 >= dr.abs() && dr.abs() >= lambda_star - opts.gradient_tol;
    let max_violation = violation(lambda_star).0;
    let touches = (psi - jet.value).abs() <= opts.touch_tol && max_violation <= opts.touch_tol;
    Ok(BarrierRun {
        n,
        a,
        a_prime,
        lambda_max,
        lambda_star,
        radius_x0: r_star,
        x0,
        u_x0: jet.value,
        psi_x0: psi,
        grad_norm_x0: grad_norm,
        radial_derivative_x0: dr,
        max_violation,
        start_ok,
        interior,
        degenerate: false,
        gradient_bound_holds,
        successful: start_ok && interior && jet.value > 0.0 && touches,
        certificate,
    })
}

fn radial_derivative(grad: &nalgebra::DVector<f64>, x: &[f64]) -> f64 {
    let r = norm(x);
    if r == 0.0 {
        return 0.0;
    }
    grad.iter().zip(x).map(|(g, xi)| g * xi / r).sum()
}

/// Mean curvature, for the inward normal, of the coordinate sphere
/// `S_radius × {ε}` inside the slice `{t = ε}` of the round sphere:
/// `((n−1)/radius)(1 + ε² − radius²)/2`.
pub fn ring_mean_curvature(radius: f64, eps: f64, n: usize) -> Result<f64> {
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(GeomError::ParameterOutOfRange { name: "radius", value: radius, expected: "0 < radius ≤ 1" });
    }
    if n < 2 {
        return Err(GeomError::InvalidDimension { got: n, reason: "rings need n ≥ 2" });
    }
    Ok((n as f64 - 1.0) / radius * (1.0 + eps * eps - radius * radius) / 2.0)
}

/// The same ring curvature computed through the slice machinery: the ring
/// is the level set `{u = ε}` of `u = ε + (|x|² − radius²)/2`.
pub fn ring_mean_curvature_direct(radius: f64, eps: f64, n: usize) -> Result<f64> {
    ring_mean_curvature(radius, eps, n)?;
    let field = SumField {
        parts: vec![Box::new(Quadratic::paraboloid(n)), Box::new(Affine::constant(n, eps - 0.5 * radius * radius))],
    };
    let mut x = vec![0.0; n];
    x[0] = radius;
    conformal::conformal_slice_mean_curvature(&field, &AmbientSpec::round_sphere(n), eps, &x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonBounds {
    /// `(n−1) u(x₀)/|Du|(x₀)`.
    pub upper: f64,
    /// `(n−1)(1 − |x₀|)`.
    pub cap: f64,
    /// Ring mean curvature at `x₀`.
    pub lower: f64,
    /// `upper ≤ cap` up to `1e−6` relative slack; the two agree at an interior touch.
    pub upper_within_cap: bool,
    /// Whether `|x₀|` is far enough from 1 for the ordering to be checked.
    pub ordering_checked: bool,
    /// `lower > cap`.
    pub ordering_holds: bool,
}

/// Default distance from `|x₀| = 1` inside which the ordering is not checked.
pub const DEFAULT_BOUNDARY_MARGIN: f64 = 1e-3;

pub fn bounds_at(radius: f64, u: f64, grad_norm: f64, n: usize, margin: f64) -> Result<ComparisonBounds> {
    if !(grad_norm >= DEFAULT_DELTA_REG) {
        return Err(GeomError::NonRegularPoint { grad_norm, threshold: DEFAULT_DELTA_REG });
    }
    let nf = n as f64 - 1.0;
    let upper = nf * u / grad_norm;
    let cap = nf * (1.0 - radius);
    let lower = ring_mean_curvature(radius, u, n)?;
    let ordering_checked = 1.0 - radius > margin;
    Ok(ComparisonBounds {
        upper,
        cap,
        lower,
        upper_within_cap: upper <= cap + 1e-6 * (1.0 + cap.abs()),
        ordering_checked,
        ordering_holds: lower > cap,
    })
}

pub fn comparison_bounds(run: &BarrierRun, n: usize, margin: f64) -> Result<ComparisonBounds> {
    bounds_at(run.radius_x0, run.u_x0, run.grad_norm_x0, n, margin)
}

/// `h (r − a)^p (1 − r)^p` for `p ∈ {1, 2}` on `[a, 1)`. With `p = 2` the
/// ratio `u/(1 − r)` peaks inside, at `r = (2 + a)/3`; with `p = 1` it
/// increases to the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub a: f64,
    pub height: f64,
    pub power: u32,
}

impl Bump {
    pub fn interior_touch_radius(&self) -> Option<f64> {
        (self.power == 2).then(|| (2.0 + self.a) / 3.0)
    }

    pub fn field(self, n: usize) -> RadialField {
        RadialField::new(n, Arc::new(self))
    }
}

impl RadialProfile for Bump {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let (p, q, h) = (r - self.a, 1.0 - r, self.height);
        match self.power {
            1 => (h * p * q, h * (q - p), -2.0 * h),
            _ => (h * p * p * q * q, 2.0 * h * p * q * (q - p), 2.0 * h * ((q - p) * (q - p) - 2.0 * p * q)),
        }
    }
    fn radial_domain(&self) -> Domain {
        Domain::Annulus { inner: self.a, outer: 1.0 }
    }
    fn profile_label(&self) -> String {
        format!("bump(a={}, h={}, p={})", self.a, self.height, self.power)
    }
}
