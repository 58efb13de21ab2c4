//! Both sides of the slice inequalities, their gap, and the equality
//! diagnostics.
//!
//! * `prod`: `c H H_Σ ≥ ½R_M − ½R_g + c² Ric(η,η) + n/(2(n−1)) c² H_Σ²` over
//!   a product `g + dt²`, where `c = ⟨ν,η⟩`.
//! * `phi`: `H̄ B ≥ ½(H̄² − |Ā|²) + n/(2(n−1)) B²` with
//!   `B = c H̄_Σ + (n−1) φ_t/W` in `φ⁻²(g + dt²)`.
//! * `euclid` and `sphere` are `prod` over a flat base and `phi` with the
//!   round-sphere factor.
//!
//! Equality requires an umbilic slice (all eigenvalues of `A_Σ`, or `Ā_Σ`,
//! equal to some `κ`) and `n−1` eigenvalues of `A` (or `Ā`) equal to `cκ`
//! (or `cκ + φ_t/W`).

use serde::Serialize;

use crate::conformal::{self, ConformalExtrinsicPoint};
use crate::error::{GeomError, Result};
use crate::fields::{AmbientSpec, BaseMetric, ScalarField};
use crate::graphgeom::{self, ExtrinsicPoint, SliceFrame, SliceOptions};
use crate::linalg;
use crate::syminv::{self, SquareMatrix};

/// Relative band for the equality diagnostics.
pub const DEFAULT_EQUALITY_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Prod,
    Phi,
    Euclid,
    Sphere,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::Prod => "prod",
            Which::Phi => "phi",
            Which::Euclid => "euclid",
            Which::Sphere => "sphere",
        }
    }
}

impl std::str::FromStr for Which {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prod" => Ok(Which::Prod),
            "phi" => Ok(Which::Phi),
            "euclid" => Ok(Which::Euclid),
            "sphere" => Ok(Which::Sphere),
            other => Err(GeomError::Parse(format!("unknown inequality '{other}' (prod|phi|euclid|sphere)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub which: Which,
    pub x: Vec<f64>,
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub cos_angle: f64,
    /// Spread of the slice eigenvalues.
    pub umbilicity_deviation: f64,
    /// Mean of the slice eigenvalues.
    pub kappa: f64,
    /// Value `n−1` eigenvalues of the shape operator should take at equality.
    pub predicted_eigenvalue: f64,
    pub multiplicity_diagnostic: f64,
    pub umbilicity_threshold: f64,
    pub multiplicity_threshold: f64,
    pub equality_detected: bool,
    /// The sum-of-squares remainder of the shape operator in the adapted chart;
    /// equals the gap up to rounding.
    pub remainder: f64,
    /// Ambient scalar curvature of the graph where it is available.
    pub scalar_curvature: Option<f64>,
}

impl InequalityReport {
    /// `|gap − remainder|`.
    pub fn decomposition_residual(&self) -> f64 {
        (self.gap - self.remainder).abs()
    }
}

/// `min(max_{i≥1} |λ_i − p|, max_{i<n−1} |λ_i − p|)` over ascending `λ`: the
/// distance of the best run of `n−1` eigenvalues from `p`.
pub fn multiplicity_distance(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n < 2 {
        return 0.0;
    }
    let dev = |s: &[f64]| s.iter().fold(0.0_f64, |m, v| m.max((v - p).abs()));
    dev(&sorted[1..]).min(dev(&sorted[..n - 1]))
}

fn newton_weight(n: usize) -> f64 {
    n as f64 / (2.0 * (n as f64 - 1.0))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn remainder_in_chart(a: &nalgebra::DMatrix<f64>, frame: &SliceFrame) -> Result<f64> {
    let chart = graphgeom::adapted_matrix(a, &frame.frame)?;
    Ok(syminv::sum_of_squares_remainder(&SquareMatrix::new(chart)?))
}

fn regular_slice(point: &ExtrinsicPoint, eps: f64) -> Result<SliceFrame> {
    graphgeom::slice_from_point(point, eps, SliceOptions::default())?.regular()
}

/// Inequality over a product base from precomputed data.
pub fn prod_from_parts(which: Which, point: &ExtrinsicPoint, frame: &SliceFrame) -> Result<InequalityReport> {
    let n = point.dim();
    let c = frame.cos_angle;
    let ric_eta = linalg::bilinear(&point.metric.ricci, &frame.eta, &frame.eta);
    let lhs = c * point.h * frame.h_sigma;
    let rhs = 0.5 * point.scalar_curvature - 0.5 * point.metric.scalar
        + c * c * ric_eta
        + newton_weight(n) * c * c * frame.h_sigma * frame.h_sigma;
    let kappa = mean(&frame.principal_sigma);
    let predicted = c * kappa;
    let umb = linalg::spread(&frame.principal_sigma);
    let mult = multiplicity_distance(&point.principal, predicted);
    let umb_thr = DEFAULT_EQUALITY_BAND * (1.0 + frame.a_sigma.norm());
    let mult_thr = DEFAULT_EQUALITY_BAND * (1.0 + point.norm_a2.max(0.0).sqrt());
    Ok(InequalityReport {
        which,
        x: point.x.clone(),
        eps: frame.eps,
        lhs,
        rhs,
        gap: lhs - rhs,
        cos_angle: c,
        umbilicity_deviation: umb,
        kappa,
        predicted_eigenvalue: predicted,
        multiplicity_diagnostic: mult,
        umbilicity_threshold: umb_thr,
        multiplicity_threshold: mult_thr,
        equality_detected: umb <= umb_thr && mult <= mult_thr,
        remainder: remainder_in_chart(&point.a, frame)?,
        scalar_curvature: Some(point.scalar_curvature),
    })
}

/// Inequality in a conformal ambient from precomputed data.
pub fn phi_from_parts(which: Which, cpoint: &ConformalExtrinsicPoint, frame: &SliceFrame) -> Result<InequalityReport> {
    let point = &cpoint.underlying;
    let n = point.dim();
    let c = frame.cos_angle;
    let trace = conformal::conformal_slice_trace(frame, point, &cpoint.phi)?;
    let time_term = cpoint.phi.dt / point.w;
    let bracket = c * trace.h_sigma_bar + (n as f64 - 1.0) * time_term;
    let lhs = cpoint.h_bar * bracket;
    let sigma2_twice = match (which, cpoint.scalar_curvature_bar) {
        // Through the ambient scalar curvature, R − n(n−1).
        (Which::Sphere, Some(r)) => r - (n * (n - 1)) as f64,
        _ => cpoint.h_bar * cpoint.h_bar - cpoint.norm_a_bar2,
    };
    let rhs = 0.5 * sigma2_twice + newton_weight(n) * bracket * bracket;

    let sigma_eigs = conformal::conformal_slice_principal(frame, &cpoint.phi);
    let kappa = mean(&sigma_eigs);
    let predicted = c * kappa + time_term;
    let umb = linalg::spread(&sigma_eigs);
    let mult = multiplicity_distance(&cpoint.principal_bar, predicted);
    let umb_thr = DEFAULT_EQUALITY_BAND * (1.0 + trace.a_sigma_bar.norm());
    let mult_thr = DEFAULT_EQUALITY_BAND * (1.0 + cpoint.norm_a_bar2.max(0.0).sqrt());
    Ok(InequalityReport {
        which,
        x: point.x.clone(),
        eps: frame.eps,
        lhs,
        rhs,
        gap: lhs - rhs,
        cos_angle: c,
        umbilicity_deviation: umb,
        kappa,
        predicted_eigenvalue: predicted,
        multiplicity_diagnostic: mult,
        umbilicity_threshold: umb_thr,
        multiplicity_threshold: mult_thr,
        equality_detected: umb <= umb_thr && mult <= mult_thr,
        remainder: remainder_in_chart(&cpoint.a_bar, frame)?,
        scalar_curvature: cpoint.scalar_curvature_bar,
    })
}

pub fn check_prod(field: &dyn ScalarField, base: &BaseMetric, eps: f64, x: &[f64]) -> Result<InequalityReport> {
    let point = graphgeom::extrinsic_point(field, base, x)?;
    let frame = regular_slice(&point, eps)?;
    prod_from_parts(Which::Prod, &point, &frame)
}

pub fn check_phi(field: &dyn ScalarField, ambient: &AmbientSpec, eps: f64, x: &[f64]) -> Result<InequalityReport> {
    let cpoint = conformal::conformal_point(field, ambient, x)?;
    let frame = regular_slice(&cpoint.underlying, eps)?;
    phi_from_parts(Which::Phi, &cpoint, &frame)
}

pub fn check_euclid(field: &dyn ScalarField, eps: f64, x: &[f64]) -> Result<InequalityReport> {
    let point = graphgeom::extrinsic_point(field, &BaseMetric::flat(field.dim()), x)?;
    let frame = regular_slice(&point, eps)?;
    prod_from_parts(Which::Euclid, &point, &frame)
}

pub fn check_sphere(field: &dyn ScalarField, eps: f64, x: &[f64]) -> Result<InequalityReport> {
    let cpoint = conformal::conformal_point(field, &AmbientSpec::round_sphere(field.dim()), x)?;
    let frame = regular_slice(&cpoint.underlying, eps)?;
    phi_from_parts(Which::Sphere, &cpoint, &frame)
}

/// Dispatches on `which`; `ambient` supplies the base (and factor for `phi`).
pub fn check(which: Which, field: &dyn ScalarField, ambient: &AmbientSpec, eps: f64, x: &[f64]) -> Result<InequalityReport> {
    match which {
        Which::Prod => check_prod(field, &ambient.base, eps, x),
        Which::Phi => check_phi(field, ambient, eps, x),
        Which::Euclid => check_euclid(field, eps, x),
        Which::Sphere => check_sphere(field, eps, x),
    }
}
