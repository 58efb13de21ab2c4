//! Seeded verification suites shared by the command line and the acceptance
//! tests. Each suite returns a [`SuiteResult`] listing named checks; the
//! suite passes when every check does. Per-item work is spread with
//! [`map_indexed`] and folded sequentially in index order, so the result does
//! not depend on the execution mode.

use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::barrier::{self, BarrierOptions, Bump};
use crate::conformal;
use crate::error::{GeomError, Result};
use crate::fields::{
    Affine, AmbientSpec, BaseMetric, ConformalFactor, PhiJet, Quadratic, RadialField, ScalarField, SphereCap,
};
use crate::graphgeom::{self, SliceOptions};
use crate::inequality::{self, InequalityReport, Which};
use crate::linalg::max_abs;
use crate::par::{map_indexed, mix_seed, Execution};
use crate::revolution::{self, RevolutionProfile};
use crate::sampling::{halton, random_field, random_field_fd, random_regular_points};
use crate::syminv::{identity_lhs, identity_residual, SquareMatrix};

/// At most this many violations are listed per suite; the checks still count all.
pub const MAX_LISTED_VIOLATIONS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::Le, limit, pass: value <= limit }
    }
    pub fn ge(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::Ge, limit, pass: value >= limit }
    }
    pub fn gt(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::Gt, limit, pass: value > limit }
    }
    /// A boolean condition, recorded as `1 ≥ 1` or `0 ≥ 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::ge(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub item: usize,
    pub location: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub pass: bool,
    pub evaluated: usize,
    pub skipped: usize,
    pub checks: Vec<Check>,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl SuiteResult {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            pass: true,
            evaluated: 0,
            skipped: 0,
            checks: Vec::new(),
            violations: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn violation(&mut self, item: usize, location: &[f64], detail: String) {
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(Violation { item, location: location.to_vec(), detail });
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Failing checks, for messages.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Running maximum that remembers where it was attained; the first index wins
/// ties so the result is order-independent of how items were computed.
#[derive(Debug, Clone, Default)]
struct Worst {
    value: f64,
    at: Option<(usize, Vec<f64>)>,
}

impl Worst {
    fn see(&mut self, v: f64, item: usize, x: &[f64]) {
        if self.at.is_none() || v > self.value || v.is_nan() {
            self.value = v;
            self.at = Some((item, x.to_vec()));
        }
    }
    fn json(&self) -> Value {
        match &self.at {
            Some((i, x)) => json!({"value": self.value, "item": i, "x": x}),
            None => Value::Null,
        }
    }
}

fn seeded_field(seed: u64, i: usize, dims: &[usize]) -> (u64, usize) {
    (mix_seed(seed, i as u64), dims[i % dims.len()])
}

fn check_dims(dims: &[usize], min: usize) -> Result<()> {
    match dims.iter().find(|n| **n < min) {
        _ if dims.is_empty() => Err(GeomError::EmptyDomain("no dimensions requested".into())),
        Some(n) => Err(GeomError::InvalidDimension { got: *n, reason: "suite dimension too small" }),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Algebraic identity

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self { dims: (2..=8).collect(), trials: 100_000, seed: 42, tol: 1e-10 }
    }
}

pub fn identity_suite(cfg: &IdentityConfig, exec: Execution) -> Result<SuiteResult> {
    check_dims(&cfg.dims, 2)?;
    let rows: Vec<Result<(f64, f64)>> = map_indexed(exec, cfg.trials, |k| {
        let n = cfg.dims[k % cfg.dims.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, k as u64));
        let a = SquareMatrix::random(&mut rng, n)?;
        let res = identity_residual(&a);
        Ok((res.abs() / identity_lhs(&a).abs().max(1.0), res))
    });
    let mut out = SuiteResult::new("identity");
    let mut worst = Worst::default();
    let mut failures = 0usize;
    for (k, r) in rows.into_iter().enumerate() {
        let (scaled, raw) = r?;
        let n = cfg.dims[k % cfg.dims.len()];
        worst.see(scaled, k, &[n as f64]);
        if !(scaled <= cfg.tol) {
            failures += 1;
            out.violation(k, &[n as f64], format!("n = {n}, residual {raw:e}"));
        }
        out.evaluated += 1;
    }
    out.push(Check::le("max scaled residual", worst.value, cfg.tol));
    out.push(Check::le("violations", failures as f64, 0.0));
    out.details = json!({"dims": cfg.dims, "trials": cfg.trials, "worst": worst.json()});
    Ok(out)
}

// ---------------------------------------------------------------------------
// Minor relation

#[derive(Debug, Clone, PartialEq)]
pub struct MinorConfig {
    pub fields: usize,
    pub points: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub radius: f64,
    pub min_grad: f64,
    pub tol_analytic: f64,
    pub tol_fd: f64,
    /// Coarsest finite-difference step; the suite also runs `h/2` and `h/4`.
    pub fd_step: f64,
    pub min_order: f64,
}

impl Default for MinorConfig {
    fn default() -> Self {
        Self {
            fields: 50,
            points: 20,
            dims: vec![2, 3, 4],
            seed: 42,
            radius: 0.9,
            min_grad: 1e-2,
            tol_analytic: 1e-8,
            tol_fd: 1e-4,
            fd_step: 4e-3,
            min_order: 1.5,
        }
    }
}

struct MinorItem {
    x: Vec<f64>,
    analytic: f64,
    fd: [f64; 3],
}

fn minor_item(seed: u64, n: usize, x: &[f64], steps: [f64; 3]) -> Result<MinorItem> {
    let field = random_field(seed, n);
    let flat = BaseMetric::flat(n);
    let point = graphgeom::extrinsic_point(&field, &flat, x)?;
    let frame = graphgeom::slice_from_point(&point, point.u, SliceOptions::default())?.regular()?;
    let analytic = graphgeom::minor_relation_residual(&frame, &point)?;
    let target = &frame.a_sigma * frame.cos_angle;
    let mut fd = [0.0; 3];
    for (k, h) in steps.iter().enumerate() {
        let f = random_field_fd(seed, n, *h);
        let p = graphgeom::extrinsic_point(&f, &flat, x)?;
        let minor = graphgeom::adapted_minor(&p.a, &frame.frame)?;
        fd[k] = max_abs(&(minor - &target));
    }
    Ok(MinorItem { x: x.to_vec(), analytic, fd })
}

pub fn minor_suite(cfg: &MinorConfig, exec: Execution) -> Result<SuiteResult> {
    check_dims(&cfg.dims, 2)?;
    let mut out = SuiteResult::new("minor");

    // Worked example: the paraboloid over the plane at (1, 0).
    let q = Quadratic::paraboloid(2);
    let p = graphgeom::extrinsic_point(&q, &BaseMetric::flat(2), &[1.0, 0.0])?;
    let f = graphgeom::slice_from_point(&p, 0.5, SliceOptions::default())?.regular()?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    out.push(Check::le("paraboloid minor entry error", (f.minor[(0, 0)] - s).abs(), 1e-12));
    out.push(Check::le("paraboloid cos angle error", (f.cos_angle - s).abs(), 1e-12));
    out.push(Check::le("paraboloid slice mean curvature error", (f.h_sigma - 1.0).abs(), 1e-12));
    out.push(Check::le("paraboloid residual", graphgeom::minor_relation_residual(&f, &p)?, cfg.tol_analytic));

    let steps = [cfg.fd_step, cfg.fd_step / 2.0, cfg.fd_step / 4.0];
    let point_sets: Vec<Result<Vec<Vec<f64>>>> = map_indexed(exec, cfg.fields, |i| {
        let (seed, n) = seeded_field(cfg.seed, i, &cfg.dims);
        random_regular_points(&random_field(seed, n), mix_seed(seed, 1), cfg.points, cfg.radius, cfg.min_grad)
    });
    let mut jobs = Vec::new();
    for (i, pts) in point_sets.into_iter().enumerate() {
        for x in pts? {
            jobs.push((i, x));
        }
    }
    let items: Vec<Result<MinorItem>> = map_indexed(exec, jobs.len(), |k| {
        let (i, x) = &jobs[k];
        let (seed, n) = seeded_field(cfg.seed, *i, &cfg.dims);
        minor_item(seed, n, x, steps)
    });
    let mut worst_a = Worst::default();
    let mut worst_fd: [Worst; 3] = Default::default();
    let mut failures = 0usize;
    for (k, item) in items.into_iter().enumerate() {
        let item = item?;
        out.evaluated += 1;
        worst_a.see(item.analytic, k, &item.x);
        for (w, e) in worst_fd.iter_mut().zip(item.fd) {
            w.see(e, k, &item.x);
        }
        if !(item.analytic <= cfg.tol_analytic) || !(item.fd[0] <= cfg.tol_fd) {
            failures += 1;
            out.violation(k, &item.x, format!("analytic {:e}, fd {:e}", item.analytic, item.fd[0]));
        }
    }
    out.push(Check::le("max analytic residual", worst_a.value, cfg.tol_analytic));
    for (w, h) in worst_fd.iter().zip(steps) {
        out.push(Check::le(format!("max fd residual h={h:e}"), w.value, cfg.tol_fd));
    }
    let order1 = (worst_fd[0].value / worst_fd[1].value).log2();
    let order2 = (worst_fd[1].value / worst_fd[2].value).log2();
    out.push(Check::ge("fd order h to h/2", order1, cfg.min_order));
    out.push(Check::ge("fd order h/2 to h/4", order2, cfg.min_order));
    out.push(Check::le("violations", failures as f64, 0.0));
    out.details = json!({
        "fields": cfg.fields,
        "points_per_field": cfg.points,
        "dims": cfg.dims,
        "fd_steps": steps,
        "worst_analytic": worst_a.json(),
        "worst_fd": worst_fd.iter().map(Worst::json).collect::<Vec<_>>(),
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Gauss relation

#[derive(Debug, Clone, PartialEq)]
pub struct GaussConfig {
    pub fields: usize,
    pub points: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub radius: f64,
    pub tol_flat: f64,
    pub tol_sphere: f64,
}

impl Default for GaussConfig {
    fn default() -> Self {
        Self { fields: 50, points: 4, dims: vec![2, 3], seed: 42, radius: 0.8, tol_flat: 1e-4, tol_sphere: 2e-3 }
    }
}

pub fn gauss_suite(cfg: &GaussConfig, exec: Execution) -> Result<SuiteResult> {
    check_dims(&cfg.dims, 2)?;
    let mut out = SuiteResult::new("gauss");
    let mut jobs = Vec::new();
    for i in 0..cfg.fields {
        let (seed, n) = seeded_field(cfg.seed, i, &cfg.dims);
        for x in random_regular_points(&random_field(seed, n), mix_seed(seed, 2), cfg.points, cfg.radius, 0.0)? {
            jobs.push((i, x));
        }
    }
    // Errors are measured relative to max(1, |R|).
    let rows: Vec<Result<[f64; 2]>> = map_indexed(exec, jobs.len(), |k| {
        let (i, x) = &jobs[k];
        let (seed, n) = seeded_field(cfg.seed, *i, &cfg.dims);
        let field = random_field(seed, n);
        let mut errs = [0.0; 2];
        for (slot, base) in [BaseMetric::flat(n), BaseMetric::round_sphere(n)].iter().enumerate() {
            let ext = graphgeom::extrinsic_point(&field, base, x)?.scalar_curvature;
            let intr = graphgeom::intrinsic_scalar_curvature(&field, base, x)?;
            errs[slot] = (ext - intr).abs() / ext.abs().max(1.0);
        }
        Ok(errs)
    });
    let mut worst: [Worst; 2] = Default::default();
    let mut failures = 0usize;
    for (k, r) in rows.into_iter().enumerate() {
        let e = r?;
        out.evaluated += 1;
        let x = &jobs[k].1;
        worst[0].see(e[0], k, x);
        worst[1].see(e[1], k, x);
        if !(e[0] <= cfg.tol_flat && e[1] <= cfg.tol_sphere) {
            failures += 1;
            out.violation(k, x, format!("flat {:e}, sphere base {:e}", e[0], e[1]));
        }
    }
    out.push(Check::le("max flat-base error", worst[0].value, cfg.tol_flat));
    out.push(Check::le("max sphere-base error", worst[1].value, cfg.tol_sphere));
    out.push(Check::le("violations", failures as f64, 0.0));
    out.details = json!({"worst_flat": worst[0].json(), "worst_sphere_base": worst[1].json()});
    Ok(out)
}

// ---------------------------------------------------------------------------
// Great spheres

#[derive(Debug, Clone, PartialEq)]
pub struct GreatSphereConfig {
    pub points: usize,
    pub dims: Vec<usize>,
    pub radius: f64,
    pub tol: f64,
    pub route_tol: f64,
}

impl Default for GreatSphereConfig {
    fn default() -> Self {
        Self { points: 1000, dims: vec![2, 3], radius: 0.95, tol: 1e-10, route_tol: 1e-8 }
    }
}

/// The first `count` Halton points that land in the open ball of `radius`.
pub fn halton_ball(n: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64;
    while out.len() < count {
        let x: Vec<f64> = halton(k, n).iter().map(|h| radius * (2.0 * h - 1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            out.push(x);
        }
        k += 1;
    }
    out
}

pub fn great_sphere_suite(cfg: &GreatSphereConfig, exec: Execution) -> Result<SuiteResult> {
    check_dims(&cfg.dims, 1)?;
    let mut out = SuiteResult::new("great-sphere");
    let mut worst_h = Worst::default();
    let mut worst_route = Worst::default();
    let mut failures = 0usize;
    let mut item = 0usize;
    for &n in &cfg.dims {
        let fields: [Box<dyn ScalarField>; 2] = [Box::new(Affine::constant(n, 0.0)), Box::new(SphereCap::hemisphere(n))];
        let pts = halton_ball(n, cfg.points, cfg.radius);
        for field in &fields {
            let rows: Vec<Result<(f64, f64)>> = map_slice_points(exec, &pts, |x| {
                let h = conformal::h_spherical(field.as_ref(), x)?;
                let route = conformal::round_sphere_point(field.as_ref(), x)?.h_bar;
                Ok((h.abs(), (h - route).abs()))
            });
            for (x, r) in pts.iter().zip(rows) {
                let (h, d) = r?;
                worst_h.see(h, item, x);
                worst_route.see(d, item, x);
                if !(h <= cfg.tol && d <= cfg.route_tol) {
                    failures += 1;
                    out.violation(item, x, format!("{}: |H| {h:e}, route gap {d:e}", field.label()));
                }
                item += 1;
            }
        }
    }
    out.evaluated = item;
    out.push(Check::le("max |H|", worst_h.value, cfg.tol));
    out.push(Check::le("max route difference", worst_route.value, cfg.route_tol));
    out.push(Check::le("violations", failures as f64, 0.0));
    out.details = json!({"worst_h": worst_h.json(), "worst_route": worst_route.json()});
    Ok(out)
}

fn map_slice_points<T: Send>(exec: Execution, pts: &[Vec<f64>], f: impl Fn(&[f64]) -> T + Sync + Send) -> Vec<T> {
    crate::par::map_slice(exec, pts, |x| f(x))
}

// ---------------------------------------------------------------------------
// Inequalities

/// A non-spherical conformal factor, `φ(x, t) = 1 + |x|²/4 + t²/10`.
pub fn bowl_factor() -> ConformalFactor {
    ConformalFactor::custom("bowl", |x: &[f64], t: f64| PhiJet {
        value: 1.0 + 0.25 * x.iter().map(|v| v * v).sum::<f64>() + 0.1 * t * t,
        grad_x: DVector::from_iterator(x.len(), x.iter().map(|v| 0.5 * v)),
        dt: 0.2 * t,
    })
}

/// The ambient each inequality variant is exercised in by the suite.
pub fn suite_ambient(which: Which, n: usize) -> AmbientSpec {
    match which {
        Which::Prod => AmbientSpec::product(BaseMetric::round_sphere(n)),
        Which::Phi => AmbientSpec::conformal(BaseMetric::flat(n), bowl_factor()),
        Which::Euclid => AmbientSpec::product(BaseMetric::flat(n)),
        Which::Sphere => AmbientSpec::round_sphere(n),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityConfig {
    pub which: Vec<Which>,
    pub fields: usize,
    pub points: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub radius: f64,
    pub min_grad: f64,
    pub gap_tol: f64,
    pub equality_tol: f64,
    pub strict_margin: f64,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            which: vec![Which::Prod, Which::Phi, Which::Euclid, Which::Sphere],
            fields: 100,
            points: 10,
            dims: vec![2, 3, 4],
            seed: 42,
            radius: 0.9,
            min_grad: 1e-3,
            gap_tol: 1e-8,
            equality_tol: 1e-6,
            strict_margin: 1e-3,
        }
    }
}

fn at_level(field: &dyn ScalarField, which: Which, ambient: &AmbientSpec, x: &[f64]) -> Result<InequalityReport> {
    inequality::check(which, field, ambient, field.value(x)?, x)
}

fn equality_case(out: &mut SuiteResult, label: &str, r: &InequalityReport, tol: f64) {
    out.push(Check::le(format!("{label}: |gap|"), r.gap.abs(), tol));
    out.push(Check::holds(format!("{label}: equality detected"), r.equality_detected));
}

pub fn inequality_suite(cfg: &InequalityConfig, exec: Execution) -> Result<SuiteResult> {
    check_dims(&cfg.dims, 2)?;
    if cfg.which.is_empty() {
        return Err(GeomError::EmptyDomain("no inequality selected".into()));
    }
    let mut out = SuiteResult::new("inequality");
    let mut fixed = Vec::new();

    for &w in &cfg.which {
        let name = w.name();
        match w {
            Which::Prod | Which::Euclid => {
                let flat2 = AmbientSpec::product(BaseMetric::flat(2));
                let r = inequality::check(w, &Quadratic::paraboloid(2), &flat2, 0.5, &[1.0, 0.0])?;
                equality_case(&mut out, &format!("{name} paraboloid (1,0)"), &r, cfg.equality_tol);
                fixed.push(r);
                for (n, x) in [(2, vec![0.3, 0.2]), (3, vec![0.3, 0.2, 0.1])] {
                    let r = at_level(&SphereCap::hemisphere(n), w, &AmbientSpec::product(BaseMetric::flat(n)), &x)?;
                    equality_case(&mut out, &format!("{name} round sphere n={n}"), &r, cfg.equality_tol);
                    fixed.push(r);
                }
                let cup = Quadratic { weights: vec![1.0, 4.0, 9.0] };
                let r = at_level(&cup, w, &AmbientSpec::product(BaseMetric::flat(3)), &[0.5, 0.3, 0.2])?;
                out.push(Check::gt(format!("{name} anisotropic cup gap"), r.gap, cfg.strict_margin));
                out.push(Check::holds(format!("{name} anisotropic cup not equality"), !r.equality_detected));
                fixed.push(r);
            }
            Which::Phi | Which::Sphere => {
                let caps = [
                    (SphereCap { n: 2, radius: 0.6, center_height: 0.2, upper: true }, vec![0.25, -0.1]),
                    (SphereCap { n: 3, radius: 0.5, center_height: -0.1, upper: true }, vec![0.1, 0.2, -0.15]),
                ];
                for (cap, x) in caps {
                    let r = at_level(&cap, w, &AmbientSpec::round_sphere(cap.n), &x)?;
                    equality_case(&mut out, &format!("{name} geodesic sphere n={}", cap.n), &r, cfg.equality_tol);
                    fixed.push(r);
                }
            }
        }
    }

    let mut jobs = Vec::new();
    for i in 0..cfg.fields {
        let (seed, n) = seeded_field(cfg.seed, i, &cfg.dims);
        for x in random_regular_points(&random_field(seed, n), mix_seed(seed, 3), cfg.points, cfg.radius, cfg.min_grad)? {
            for &w in &cfg.which {
                jobs.push((i, w, x.clone()));
            }
        }
    }
    let rows: Vec<Result<InequalityReport>> = map_indexed(exec, jobs.len(), |k| {
        let (i, w, x) = &jobs[k];
        let (seed, n) = seeded_field(cfg.seed, *i, &cfg.dims);
        at_level(&random_field(seed, n), *w, &suite_ambient(*w, n), x)
    });
    let mut min_gap = Worst::default();
    let mut worst_decomp = Worst::default();
    let mut failures = 0usize;
    for (k, r) in rows.into_iter().enumerate() {
        let r = r?;
        out.evaluated += 1;
        min_gap.see(-r.gap, k, &r.x);
        worst_decomp.see(r.decomposition_residual() / r.lhs.abs().max(r.rhs.abs()).max(1.0), k, &r.x);
        if !(r.gap >= -cfg.gap_tol) {
            failures += 1;
            out.violation(k, &r.x, format!("{}: eps {}, gap {:e}", r.which.name(), r.eps, r.gap));
        }
    }
    out.push(Check::ge("min gap over random fields", -min_gap.value, -cfg.gap_tol));
    out.push(Check::le("violations", failures as f64, 0.0));
    out.details = json!({
        "which": cfg.which,
        "fields": cfg.fields,
        "points_per_field": cfg.points,
        "min_gap": {"value": -min_gap.value, "at": min_gap.json()},
        "worst_relative_decomposition_residual": worst_decomp.json(),
        "fixed_cases": fixed,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Barrier

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSuiteConfig {
    pub opts: BarrierOptions,
    pub ring_tol: f64,
    pub margin: f64,
}

impl Default for BarrierSuiteConfig {
    fn default() -> Self {
        Self { opts: BarrierOptions::default(), ring_tol: 1e-8, margin: barrier::DEFAULT_BOUNDARY_MARGIN }
    }
}

struct BarrierCase {
    label: String,
    field: RadialField,
    a: f64,
    a_prime: f64,
    lambda_max: f64,
    expect_interior: bool,
}

fn barrier_cases() -> Vec<BarrierCase> {
    let bump = |a: f64, height: f64, power: u32, n: usize, a_prime: f64| BarrierCase {
        label: format!("bump a={a} h={height} p={power} n={n}"),
        field: Bump { a, height, power }.field(n),
        a,
        a_prime,
        lambda_max: 50.0,
        expect_interior: power == 2,
    };
    vec![
        bump(0.5, 3.0, 2, 2, 0.6),
        bump(0.25, 1.0, 2, 2, 0.3),
        bump(0.2, 1.0, 2, 3, 0.3),
        bump(0.5, 2.0, 1, 2, 0.6),
        BarrierCase {
            label: "glued profile u a=0.5".into(),
            field: RadialField::new(2, Arc::new(RevolutionProfile::SphereU { a: 0.5 })),
            a: 0.5,
            a_prime: 0.6,
            lambda_max: 1e4,
            expect_interior: false,
        },
    ]
}

pub fn barrier_suite(cfg: &BarrierSuiteConfig) -> Result<SuiteResult> {
    let mut out = SuiteResult::new("barrier");
    let mut runs = Vec::new();
    let mut worst_bound = f64::NEG_INFINITY;
    let mut successes = 0usize;
    for (k, case) in barrier_cases().into_iter().enumerate() {
        let mut opts = cfg.opts;
        if case.field.dim() > 2 {
            opts.angular = opts.angular.max(256);
        }
        let run = barrier::slide(&case.field, case.a, case.a_prime, case.lambda_max, &opts)?;
        out.evaluated += 1;
        if case.expect_interior {
            out.push(Check::holds(format!("{}: interior touch found", case.label), run.successful));
        }
        let bounds = barrier::comparison_bounds(&run, run.n, cfg.margin)?;
        if run.successful {
            successes += 1;
            worst_bound = worst_bound.max(run.lambda_star - run.grad_norm_x0);
            if !run.gradient_bound_holds {
                out.violation(k, &run.x0, format!("{}: |Du| {} < λ* {}", case.label, run.grad_norm_x0, run.lambda_star));
            }
            out.push(Check::holds(format!("{}: gradient bound", case.label), run.gradient_bound_holds));
            out.push(Check::holds(format!("{}: upper within cap", case.label), bounds.upper_within_cap));
            if bounds.ordering_checked {
                out.push(Check::holds(format!("{}: lower exceeds cap", case.label), bounds.ordering_holds));
            }
        }
        runs.push(json!({"case": case.label, "run": run, "bounds": bounds}));
    }
    out.push(Check::ge("successful slides", successes as f64, 1.0));
    out.push(Check::le("max (lambda* - |Du|) on successful slides", worst_bound, cfg.opts.gradient_tol));

    let mut ring_err: f64 = 0.0;
    for n in [2, 3, 4] {
        for radius in [0.2, 0.5, 0.8, 0.95] {
            for eps in [-0.3, 0.0, 0.4] {
                let a = barrier::ring_mean_curvature(radius, eps, n)?;
                let b = barrier::ring_mean_curvature_direct(radius, eps, n)?;
                ring_err = ring_err.max((a - b).abs());
            }
        }
    }
    out.push(Check::le("ring curvature vs slice route", ring_err, cfg.ring_tol));

    let pair = barrier::bounds_at(0.5, 0.0, 1.0, 2, cfg.margin)?;
    out.push(Check::le("bound pair cap error", (pair.cap - 0.5).abs(), 1e-15));
    out.push(Check::le("bound pair lower error", (pair.lower - 0.75).abs(), 1e-15));
    out.push(Check::holds("bound pair strict ordering", pair.ordering_checked && pair.ordering_holds));
    out.details = json!({"runs": runs, "bound_pair": pair});
    Ok(out)
}

// ---------------------------------------------------------------------------
// Surfaces of revolution

pub fn glued_suite(a: f64, samples: usize, exec: Execution) -> Result<(SuiteResult, Vec<revolution::GluedSample>)> {
    let sweep = revolution::glued_sweep(a, samples, exec)?;
    let mut out = SuiteResult::new("spherical-glued");
    out.evaluated = sweep.len();
    let k = revolution::cap_curvature(a)?;
    let cap_r = revolution::cap_scalar_curvature(a)?;

    // The cap through the pipeline.
    let v = revolution::radial_field(RevolutionProfile::SphereV { a });
    let mut cap_err: f64 = 0.0;
    let mut cap_r_err: f64 = 0.0;
    for x in [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.6]] {
        let c = conformal::round_sphere_point(&v, &x)?;
        for l in &c.principal_bar {
            cap_err = cap_err.max((l - k).abs());
        }
        cap_r_err = cap_r_err.max((c.scalar_curvature_bar.unwrap_or(f64::NAN) - cap_r).abs());
    }
    out.push(Check::le("cap principal curvatures vs pipeline", cap_err, 1e-9));
    out.push(Check::le("cap scalar curvature vs pipeline", cap_r_err, 1e-9));

    let min_r = sweep.iter().map(|s| s.scalar).fold(f64::INFINITY, f64::min);
    out.push(Check::ge("min R over sweep", min_r, 2.0 - 1e-10));
    let locus = sweep
        .iter()
        .filter(|s| s.scalar <= 2.0 + 1e-10)
        .map(|s| if s.piece == "u" { (s.r - a).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    out.push(Check::le("equality locus distance from r = a", locus, 1e-6));

    let junction = revolution::junction_c2_check(a, &revolution::default_junction_radii())?;
    out.push(Check::le("junction value error", junction.value_error, junction.tolerance));
    out.push(Check::le("junction |lambda1| error", junction.lambda1_error, junction.tolerance));
    out.push(Check::le("junction |lambda2| error", junction.lambda2_error, junction.tolerance));
    out.push(Check::holds("junction check", junction.pass));

    let mono = revolution::monotonicity_checks(a, 10_000)?;
    out.push(Check::holds("profile conditions", mono.all_hold));

    let u = revolution::radial_field(RevolutionProfile::SphereU { a });
    let radii = revolution::linspace(a + 1e-3, 0.995, 100);
    let diffs: Vec<Result<f64>> = map_indexed(exec, radii.len(), |i| {
        let r = radii[i];
        let c = conformal::round_sphere_point(&u, &[0.6 * r, 0.8 * r])?;
        let (l1, l2) = revolution::principal_curvatures_u(a, r)?;
        let mut expect = [l1, l2];
        expect.sort_by(f64::total_cmp);
        Ok(expect
            .iter()
            .zip(&c.principal_bar)
            .map(|(e, p)| (e - p).abs() / e.abs().max(1.0))
            .fold(0.0, f64::max))
    });
    let mut worst = 0.0f64;
    for d in diffs {
        worst = worst.max(d?);
    }
    out.push(Check::le("closed form vs pipeline", worst, 1e-6));
    out.details = json!({
        "a": a,
        "cap_curvature": k,
        "cap_scalar_curvature": cap_r,
        "min_scalar_curvature": min_r,
        "junction": junction,
        "profile_conditions": mono,
    });
    Ok((out, sweep))
}

pub fn euclid_cone_suite(samples: usize, exec: Execution) -> Result<(SuiteResult, Vec<revolution::EuclidSample>)> {
    let sweep = revolution::euclid_sweep(samples, exec)?;
    let mut out = SuiteResult::new("euclid-cone");
    out.evaluated = sweep.len();
    let min_k = sweep.iter().map(|s| s.gauss).fold(f64::INFINITY, f64::min);
    out.push(Check::ge("min Gauss curvature", min_k, -1e-10));
    let f = RevolutionProfile::EuclidF;
    let at0 = revolution::profile_jet(&f, 0.0)?;
    let at1 = revolution::profile_jet(&f, 1.0)?;
    out.push(Check::holds("f(0) = 1", at0.value == 1.0));
    out.push(Check::holds("f(1) = 0", at1.value == 0.0));
    out.push(Check::holds("f' = +inf at 0", at0.singular && at0.first == f64::INFINITY));
    let near = revolution::profile_jet(&f, 1e-12)?;
    out.push(Check::gt("f' near 0", near.first, 1e5));
    out.details = json!({"samples": samples, "min_gauss_curvature": min_k});
    Ok((out, sweep))
}
