//! The explicit surfaces of revolution.
//!
//! * `f(z) = (√z + 1)√(1 − z²)` on `[0, 1]`, rotated about the `z`-axis in
//!   Euclidean space: a concave profile tangent to the plane `z = 0`.
//! * For `0 < a < 1`, the glued surface in the round 3-sphere (stereographic
//!   chart over a flat base): the annular graph of
//!   `u(r) = (−2√(1−r) − r/√(1−a) + 2√(1−a) + a/√(1−a))/√2` on `[a, 1]`,
//!   capped over the unit disk by `v(r) = √((1−a)/2) + √(1 − r²)`.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::{Domain, RadialField, RadialProfile};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RevolutionProfile {
    /// `f(z)`, the Euclidean profile.
    EuclidF,
    /// `u(r)` on `[a, 1]`.
    SphereU { a: f64 },
    /// `v(r)` on `[0, 1]`.
    SphereV { a: f64 },
}

/// Value and derivatives; `singular` marks the vertical tangent, where the
/// derivatives are reported as infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileJet {
    pub value: f64,
    pub first: f64,
    pub second: f64,
    pub singular: bool,
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(GeomError::ParameterOutOfRange { name: "a", value: a, expected: "0 < a < 1" })
    }
}

impl RevolutionProfile {
    pub fn interval(&self) -> (f64, f64) {
        match *self {
            RevolutionProfile::EuclidF => (0.0, 1.0),
            RevolutionProfile::SphereU { a } => (a, 1.0),
            RevolutionProfile::SphereV { .. } => (0.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RevolutionProfile::EuclidF => Ok(()),
            RevolutionProfile::SphereU { a } | RevolutionProfile::SphereV { a } => check_a(a),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RevolutionProfile::EuclidF => "f",
            RevolutionProfile::SphereU { .. } => "u",
            RevolutionProfile::SphereV { .. } => "v",
        }
    }

    /// `(p, p′, p″)` by the closed forms, without domain checks.
    fn raw(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            RevolutionProfile::EuclidF => {
                let sq = s.sqrt();
                let q = (1.0 - s * s).sqrt();
                let (ds, dds) = (0.5 / sq, -0.25 / (sq * sq * sq));
                let (dq, ddq) = (-s / q, -1.0 / (q * q * q));
                let value = (sq + 1.0) * q;
                let first = ds * q + (sq + 1.0) * dq;
                let second = dds * q + 2.0 * ds * dq + (sq + 1.0) * ddq;
                (value, first, second)
            }
            RevolutionProfile::SphereU { a } => u_closed(a, s),
            RevolutionProfile::SphereV { a } => {
                let q = (1.0 - s * s).sqrt();
                (cap_height(a) + q, -s / q, -1.0 / (q * q * q))
            }
        }
    }
}

/// `u(1) = v(1) = √((1−a)/2)`.
pub fn cap_height(a: f64) -> f64 {
    ((1.0 - a) / 2.0).sqrt()
}

fn u_closed(a: f64, r: f64) -> (f64, f64, f64) {
    let ca = (1.0 - a).sqrt();
    let cr = (1.0 - r).sqrt();
    let value = (-2.0 * cr - r / ca + 2.0 * ca + a / ca) / SQRT_2;
    let first = (1.0 / cr - 1.0 / ca) / SQRT_2;
    let second = 1.0 / (2.0 * SQRT_2 * cr * cr * cr);
    (value, first, second)
}

pub fn profile_jet(profile: &RevolutionProfile, s: f64) -> Result<ProfileJet> {
    profile.validate()?;
    let (lo, hi) = profile.interval();
    if !s.is_finite() || s < lo || s > hi {
        return Err(GeomError::OutOfDomain { point: vec![s] });
    }
    let (value, first, second) = profile.raw(s);
    let singular = match profile {
        RevolutionProfile::EuclidF => s == 0.0 || s == 1.0,
        _ => s == 1.0,
    };
    if singular {
        // Endpoint values from the closed forms; derivatives blow up.
        let value = match *profile {
            RevolutionProfile::EuclidF => {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RevolutionProfile::SphereU { a } | RevolutionProfile::SphereV { a } => cap_height(a),
        };
        let sign = match profile {
            RevolutionProfile::EuclidF if s == 0.0 => 1.0,
            RevolutionProfile::SphereU { .. } => 1.0,
            _ => -1.0,
        };
        return Ok(ProfileJet { value, first: sign * f64::INFINITY, second: f64::INFINITY * sign, singular: true });
    }
    Ok(ProfileJet { value, first, second, singular: false })
}

impl RadialProfile for RevolutionProfile {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        self.raw(r)
    }
    fn radial_domain(&self) -> Domain {
        match *self {
            RevolutionProfile::SphereU { a } => Domain::Annulus { inner: a, outer: 1.0 },
            _ => Domain::Ball { radius: 1.0 },
        }
    }
    fn profile_label(&self) -> String {
        match *self {
            RevolutionProfile::EuclidF => "f".into(),
            RevolutionProfile::SphereU { a } => format!("u(a={a})"),
            RevolutionProfile::SphereV { a } => format!("v(a={a})"),
        }
    }
}

/// The radial graph `x ↦ p(|x|)` over `ℝ²`.
pub fn radial_field(profile: RevolutionProfile) -> RadialField {
    RadialField::new(2, Arc::new(profile))
}

/// Principal curvatures of the cap `v`: `−(1−a)/4` twice.
pub fn cap_curvature(a: f64) -> Result<f64> {
    check_a(a)?;
    Ok(-(1.0 - a) / 4.0)
}

/// Scalar curvature `2 + 2κ²` of the cap.
pub fn cap_scalar_curvature(a: f64) -> Result<f64> {
    let k = cap_curvature(a)?;
    Ok(2.0 + 2.0 * k * k)
}

/// Closed-form principal curvatures `(λ₁, λ₂)` of the graph of `u` in the
/// round sphere for the upward normal; `λ₁` is radial.
pub fn principal_curvatures_u(a: f64, r: f64) -> Result<(f64, f64)> {
    check_a(a)?;
    if !(r >= a && r < 1.0) {
        return Err(GeomError::OutOfDomain { point: vec![r] });
    }
    let (u, du, ddu) = u_closed(a, r);
    let w2 = 1.0 + du * du;
    let w = w2.sqrt();
    let half = (1.0 + u * u + r * r) / 2.0;
    let l1 = (u - r * du + half * ddu / w2) / w;
    let l2 = (u - r * du + half * du / r) / w;
    Ok((l1, l2))
}

pub fn scalar_curvature_u(a: f64, r: f64) -> Result<f64> {
    let (l1, l2) = principal_curvatures_u(a, r)?;
    Ok(2.0 + 2.0 * l1 * l2)
}

/// `u″ − u′(1 + u′²)` in closed form.
pub fn convexity_margin(a: f64, r: f64) -> f64 {
    let (_, du, ddu) = u_closed(a, r);
    ddu - du * (1.0 + du * du)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub a: f64,
    pub samples: usize,
    /// `|u(a)|`.
    pub value_at_a: f64,
    /// `|u′(a)|`.
    pub slope_at_a: f64,
    pub boundary_conditions_hold: bool,
    /// Minimum of `u′` over the sampled points of `(a, 1)`.
    pub min_slope: f64,
    pub slope_positive: bool,
    /// Minimum of `u″ − u′(1 + u′²)` over `[a, 1)`.
    pub min_convexity_margin: f64,
    pub convexity_margin_at_a: f64,
    pub convexity_holds: bool,
    pub all_hold: bool,
}

/// Boundary and sign conditions on `u` sampled at `samples` points of `[a, 1)`.
pub fn monotonicity_checks(a: f64, samples: usize) -> Result<MonotonicityReport> {
    check_a(a)?;
    if samples < 2 {
        return Err(GeomError::ParameterOutOfRange { name: "samples", value: samples as f64, expected: "at least 2" });
    }
    let grid: Vec<f64> = (0..samples).map(|i| a + (1.0 - a) * i as f64 / samples as f64).collect();
    let (u0, du0, _) = u_closed(a, a);
    let tol = 1e-14;
    let mut min_slope = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for (i, r) in grid.iter().enumerate() {
        let (_, du, _) = u_closed(a, *r);
        if i > 0 {
            min_slope = min_slope.min(du);
        }
        min_margin = min_margin.min(convexity_margin(a, *r));
    }
    let boundary = u0.abs() <= tol && du0.abs() <= tol;
    let slope_positive = min_slope > 0.0;
    let convexity = min_margin > 0.0;
    Ok(MonotonicityReport {
        a,
        samples,
        value_at_a: u0.abs(),
        slope_at_a: du0.abs(),
        boundary_conditions_hold: boundary,
        min_slope,
        slope_positive,
        min_convexity_margin: min_margin,
        convexity_margin_at_a: convexity_margin(a, a),
        convexity_holds: convexity,
        all_hold: boundary && slope_positive && convexity,
    })
}

/// Default junction tolerance.
pub const JUNCTION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionReport {
    pub a: f64,
    pub radii: Vec<f64>,
    pub value_limit: f64,
    pub lambda1_limit: f64,
    pub lambda2_limit: f64,
    pub cap_value: f64,
    pub cap_curvature: f64,
    /// Sign relating the `u`-side limits to the cap curvature with its own
    /// upward normal; the normal turns over across the vertical tangent.
    pub sign_map: f64,
    pub value_error: f64,
    pub lambda1_error: f64,
    pub lambda2_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Limit at `t = 0` of samples `(t_k, y_k)` by Neville extrapolation.
pub fn extrapolate_to_zero(ts: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let m = ts.len();
    for level in 1..m {
        for i in 0..(m - level) {
            let (ti, tj) = (ts[i], ts[i + level]);
            p[i] = (ti * p[i + 1] - tj * p[i]) / (ti - tj);
        }
    }
    p[0]
}

/// One-sided limits of the value and principal curvatures along the graph of
/// `u` at `r → 1⁻`, extrapolated in `t = √(1 − r)`, against the cap.
pub fn junction_c2_check(a: f64, radii: &[f64]) -> Result<JunctionReport> {
    check_a(a)?;
    if radii.len() < 2 || radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| *r >= 1.0 || *r < a) {
        return Err(GeomError::PreconditionViolated("radii must increase within [a, 1)".into()));
    }
    let ts: Vec<f64> = radii.iter().map(|r| (1.0 - r).sqrt()).collect();
    let mut vals = Vec::new();
    let mut l1s = Vec::new();
    let mut l2s = Vec::new();
    for r in radii {
        vals.push(u_closed(a, *r).0);
        let (l1, l2) = principal_curvatures_u(a, *r)?;
        l1s.push(l1);
        l2s.push(l2);
    }
    let value_limit = extrapolate_to_zero(&ts, &vals);
    let lambda1_limit = extrapolate_to_zero(&ts, &l1s);
    let lambda2_limit = extrapolate_to_zero(&ts, &l2s);
    let cap_value = cap_height(a);
    let cap_k = cap_curvature(a)?;
    let sign_map = -1.0;
    let value_error = (value_limit - cap_value).abs();
    let lambda1_error = (lambda1_limit.abs() - cap_k.abs()).abs();
    let lambda2_error = (lambda2_limit.abs() - cap_k.abs()).abs();
    let signs_ok = (sign_map * lambda1_limit).signum() == cap_k.signum() && (sign_map * lambda2_limit).signum() == cap_k.signum();
    Ok(JunctionReport {
        a,
        radii: radii.to_vec(),
        value_limit,
        lambda1_limit,
        lambda2_limit,
        cap_value,
        cap_curvature: cap_k,
        sign_map,
        value_error,
        lambda1_error,
        lambda2_error,
        tolerance: JUNCTION_TOL,
        pass: value_error <= JUNCTION_TOL && lambda1_error <= JUNCTION_TOL && lambda2_error <= JUNCTION_TOL && signs_ok,
    })
}

/// `r_k = 1 − 10^{−k}` for `k = 2..=6`.
pub fn default_junction_radii() -> Vec<f64> {
    (2..=6).map(|k| 1.0 - 10f64.powi(-k)).collect()
}

/// Gauss curvature `−f″/(f (1 + f′²)²)` of the surface obtained by rotating
/// `r = f(z)` about the `z`-axis.
pub fn gauss_curvature_f(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(GeomError::OutOfDomain { point: vec![z] });
    }
    let (f, df, ddf) = RevolutionProfile::EuclidF.raw(z);
    Ok(-ddf / (f * (1.0 + df * df).powi(2)))
}

/// Radial profile `h = f⁻¹` near `f(z₀)`, inverted by Newton's method on the
/// branch through `z₀`; used to view the surface as a graph `z = h(|x|)`.
#[derive(Debug, Clone, Copy)]
pub struct InverseProfile {
    pub z0: f64,
}

impl InverseProfile {
    fn invert(&self, r: f64) -> f64 {
        let mut z = self.z0;
        for _ in 0..60 {
            let (f, df, _) = RevolutionProfile::EuclidF.raw(z);
            let step = (f - r) / df;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        z
    }
}

impl RadialProfile for InverseProfile {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let z = self.invert(r);
        let (_, df, ddf) = RevolutionProfile::EuclidF.raw(z);
        (z, 1.0 / df, -ddf / (df * df * df))
    }
    fn radial_domain(&self) -> Domain {
        Domain::Whole
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclidSample {
    pub z: f64,
    pub f: f64,
    pub gauss: f64,
    pub scalar: f64,
}

/// `samples` evenly spaced points of `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![lo];
    }
    (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect()
}

pub fn euclid_sweep(samples: usize, exec: Execution) -> Result<Vec<EuclidSample>> {
    let zs = linspace(0.01, 0.99, samples);
    map_indexed(exec, zs.len(), |i| {
        let z = zs[i];
        let k = gauss_curvature_f(z)?;
        Ok(EuclidSample { z, f: RevolutionProfile::EuclidF.raw(z).0, gauss: k, scalar: 2.0 * k })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluedSample {
    /// `"u"` on the annulus, `"v"` on the cap.
    pub piece: &'static str,
    pub r: f64,
    pub value: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub scalar: f64,
}

/// The graph of `u` on `[a, 1)` followed by the cap `v` on `[0, 1)`.
pub fn glued_sweep(a: f64, samples: usize, exec: Execution) -> Result<Vec<GluedSample>> {
    check_a(a)?;
    let rs: Vec<f64> = (0..samples).map(|i| a + (1.0 - a) * i as f64 / samples as f64).collect();
    let mut out: Vec<GluedSample> = map_indexed(exec, rs.len(), |i| {
        let r = rs[i];
        let (l1, l2) = principal_curvatures_u(a, r)?;
        Ok(GluedSample { piece: "u", r, value: u_closed(a, r).0, lambda1: l1, lambda2: l2, scalar: 2.0 + 2.0 * l1 * l2 })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let k = cap_curvature(a)?;
    let cap = RevolutionProfile::SphereV { a };
    for i in 0..samples {
        let r = i as f64 / samples as f64;
        out.push(GluedSample { piece: "v", r, value: cap.raw(r).0, lambda1: k, lambda2: k, scalar: 2.0 + 2.0 * k * k });
    }
    Ok(out)
}
