//! The `curv` command line.
//!
//! Exit codes: `0` when every check passed, `1` when a check failed (the
//! report names the location), `2` for usage, config or input errors.

pub mod settings;
pub mod spec;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::barrier::{self, BarrierOptions};
use crate::conformal;
use crate::error::{GeomError, Result};
use crate::fields::{Scaled, ScalarField};
use crate::graphgeom::{self, SliceOptions, SliceOutcome};
use crate::inequality::{self, Which};
use crate::par::Execution;
use crate::report::{self, join_numbers, num, Report};
use crate::sampling::{slice_points_on_rays, RaySampler};
use crate::suite::{self, Check, SuiteResult};

use settings::Settings;
use spec::{parse_ambient, parse_field, parse_list};

#[derive(Debug, Parser)]
#[command(name = "curv", version, about = "Curvature of graph hypersurfaces: point data, slices, verification suites, barrier runs and examples")]
pub struct Cli {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path, or `json` / `csv` / `-` for standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// `json` or `csv`; defaults to the output file's extension, else json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Run on one thread. Results are identical either way.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Tolerance override `name=value` (repeatable); values below 1e-14 are rejected.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extrinsic (and conformal) data of the graph at one point.
    Point(PointArgs),
    /// Slice frames along level sets, with minor-relation residuals.
    Slice(SliceArgs),
    /// Seeded verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Slide the cone barrier onto a field and compare the curvature bounds.
    Barrier(BarrierArgs),
    /// Surfaces of revolution: sweeps and checks.
    Example(ExampleArgs),
}

#[derive(Debug, Args, Default)]
pub struct FieldArgs {
    /// Field spec, e.g. `paraboloid`, `cup:1,4,9`, `hemisphere:1`, `grid:<path>`.
    #[arg(long)]
    pub field: Option<String>,
    /// `flat`, `spherical`, `sphere-base`, `conformal:bowl`, `conformal:const:<c>`.
    #[arg(long)]
    pub ambient: Option<String>,
    /// Dimension for specs that do not fix one.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub f: FieldArgs,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct RayArgs {
    /// Comma-separated levels.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    #[arg(long)]
    pub rays: Option<usize>,
    /// Ray origin; defaults to the origin.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Ray length; defaults to the domain's extent or 2.
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[command(flatten)]
    pub f: FieldArgs,
    #[command(flatten)]
    pub r: RayArgs,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// The algebraic identity on random matrices.
    Identity {
        /// Matrix sizes, comma-separated.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// The minor relation on seeded random fields, analytic and finite-difference.
    Minor {
        #[command(flatten)]
        s: SuiteSize,
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Gauss-equation scalar curvature against the intrinsic computation.
    Gauss {
        #[command(flatten)]
        s: SuiteSize,
    },
    /// Mean curvature of great spheres in the round ambient.
    GreatSphere {
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        dims: Option<String>,
    },
    /// The slice inequalities; seeded suite, or a given field with `--field`.
    Inequality {
        /// `prod`, `phi`, `euclid`, `sphere`, comma-separated.
        #[arg(long)]
        which: Option<String>,
        #[command(flatten)]
        s: SuiteSize,
        #[command(flatten)]
        f: FieldArgs,
        #[command(flatten)]
        r: RayArgs,
    },
}

#[derive(Debug, Args, Default)]
pub struct SuiteSize {
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Dimensions cycled over the seeded fields, comma-separated.
    #[arg(long)]
    pub dims: Option<String>,
}

#[derive(Debug, Args)]
pub struct BarrierArgs {
    /// Field to slide against; without it the built-in barrier suite runs.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long = "a-prime")]
    pub a_prime: Option<f64>,
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub radial: Option<usize>,
    #[arg(long)]
    pub angular: Option<usize>,
    /// Slide against `−u` instead of `u`.
    #[arg(long)]
    pub negate: bool,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// `euclid-cone` or `spherical-glued`.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub command: String,
    pub suites: Vec<SuiteResult>,
    /// Extra JSON results after the suites.
    pub extra: Vec<Value>,
    /// Command-specific CSV; falls back to the check table.
    pub csv: Option<String>,
}

impl Outcome {
    fn new(command: &str) -> Self {
        Self { command: command.into(), suites: Vec::new(), extra: Vec::new(), csv: None }
    }

    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn parse_format(s: &str) -> Result<Format> {
    match s {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(GeomError::Parse(format!("unknown format '{other}' (json|csv)"))),
    }
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| GeomError::Parse(format!("{what}: '{t}' is not a count"))))
        .collect()
}

fn parse_which(s: &str) -> Result<Vec<Which>> {
    if s.trim() == "all" {
        return Ok(vec![Which::Prod, Which::Phi, Which::Euclid, Which::Sphere]);
    }
    s.split(',').map(|t| t.trim().parse::<Which>()).collect()
}

/// Parses `args` and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("curv: error: {e}");
            2
        }
    }
}

/// Runs a parsed command line and writes its output.
pub fn execute(cli: &Cli) -> Result<i32> {
    let mut s = Settings::new(cli.config.as_deref(), &cli.tol)?;
    let exec = if s.switch("sequential", cli.sequential)? { Execution::Sequential } else { Execution::Parallel };
    let out = s.opt::<String>("out", cli.out.clone())?;
    let format = s.opt::<String>("format", cli.format.clone())?;
    // Output routing and threading never change report content.
    for k in ["out", "format", "sequential"] {
        s.echo.remove(k);
    }
    let seed = s.get("seed", cli.seed, 42u64)?;
    let outcome = match &cli.command {
        Command::Point(a) => point(&mut s, a)?,
        Command::Slice(a) => slice(&mut s, a)?,
        Command::Verify(v) => verify(&mut s, v, seed, exec)?,
        Command::Barrier(a) => barrier_cmd(&mut s, a, exec)?,
        Command::Example(a) => example(&mut s, a, exec)?,
    };
    let unused = s.unused_tolerances();
    if !unused.is_empty() {
        return Err(GeomError::Parse(format!("tolerance(s) not used by this command: {}", unused.join(", "))));
    }

    let mut rep = Report::new(outcome.command.clone(), seed);
    rep.meta.config = s.echo.clone();
    rep.meta.tolerances = s.tolerances.clone();
    for r in &outcome.suites {
        rep.push(r)?;
    }
    for v in &outcome.extra {
        rep.push(v)?;
    }

    let (path, fmt) = match out.as_deref() {
        None | Some("-") => (None, format.as_deref().map(parse_format).transpose()?.unwrap_or(Format::Json)),
        Some("json") => (None, Format::Json),
        Some("csv") => (None, Format::Csv),
        Some(p) => {
            let by_ext = if Path::new(p).extension().is_some_and(|e| e == "csv") { Format::Csv } else { Format::Json };
            (Some(PathBuf::from(p)), format.as_deref().map(parse_format).transpose()?.unwrap_or(by_ext))
        }
    };
    let text = match fmt {
        Format::Json => rep.to_json()?,
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| report::checks_csv(&outcome.suites)),
    };
    match path {
        Some(p) => report::write_text(&p, &text)?,
        None => print!("{text}"),
    }

    if outcome.pass() {
        Ok(0)
    } else {
        for r in outcome.suites.iter().filter(|r| !r.pass) {
            for c in r.failures() {
                eprintln!("curv: {}: check '{}' failed: {} vs limit {}", r.suite, c.name, c.value, c.limit);
            }
            if let Some(v) = r.violations.first() {
                eprintln!("curv: {}: first violation at item {} {:?}: {}", r.suite, v.item, v.location, v.detail);
            }
        }
        Ok(1)
    }
}

struct Loaded {
    field: Box<dyn ScalarField>,
    ambient: crate::fields::AmbientSpec,
    ambient_given: bool,
}

fn load_field(s: &mut Settings, f: &FieldArgs, dim_hint: usize) -> Result<Loaded> {
    let spec = s.required::<String>("field", f.field.clone())?;
    let dim = s.get("dim", f.dim, dim_hint)?;
    let field = parse_field(&spec, dim)?;
    let given = s.opt::<String>("ambient", f.ambient.clone())?;
    let ambient = parse_ambient(given.as_deref().unwrap_or("flat"), field.dim())?;
    s.echo.insert("ambient".into(), given.clone().unwrap_or_else(|| "flat".into()));
    Ok(Loaded { field, ambient, ambient_given: given.is_some() })
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn point(s: &mut Settings, a: &PointArgs) -> Result<Outcome> {
    let at = parse_list(&s.required::<String>("at", a.at.clone())?)?;
    let l = load_field(s, &a.f, at.len().max(1))?;
    if l.field.dim() != at.len() {
        return Err(GeomError::DimensionMismatch { expected: l.field.dim(), got: at.len() });
    }
    let p = graphgeom::extrinsic_point(l.field.as_ref(), &l.ambient.base, &at)?;
    let mut item = json!({
        "field": l.field.label(),
        "x": at,
        "u": p.u,
        "gradient": p.grad.as_slice(),
        "grad_norm": p.grad_norm,
        "w": p.w,
        "normal": p.nu.as_slice(),
        "shape_operator": rows(&p.a),
        "mean_curvature": p.h,
        "norm_a2": p.norm_a2,
        "principal_curvatures": p.principal,
        "scalar_curvature": p.scalar_curvature,
    });
    let mut csv_rows: Vec<Vec<String>> = vec![
        vec!["u".into(), num(p.u)],
        vec!["grad_norm".into(), num(p.grad_norm)],
        vec!["mean_curvature".into(), num(p.h)],
        vec!["norm_a2".into(), num(p.norm_a2)],
        vec!["principal_curvatures".into(), join_numbers(&p.principal)],
        vec!["scalar_curvature".into(), num(p.scalar_curvature)],
    ];
    if l.ambient.factor.is_some() {
        let phi = l.ambient.phi(&at, p.u)?;
        let c = conformal::conformal_from_point(p, phi, l.ambient.is_round_sphere())?;
        item["conformal"] = json!({
            "phi": c.phi.value,
            "mu": c.mu,
            "mean_curvature": c.h_bar,
            "norm_a2": c.norm_a_bar2,
            "principal_curvatures": c.principal_bar,
            "scalar_curvature": c.scalar_curvature_bar,
        });
        csv_rows.push(vec!["conformal_mean_curvature".into(), num(c.h_bar)]);
        csv_rows.push(vec!["conformal_principal_curvatures".into(), join_numbers(&c.principal_bar)]);
        if let Some(r) = c.scalar_curvature_bar {
            csv_rows.push(vec!["conformal_scalar_curvature".into(), num(r)]);
        }
        if l.ambient.is_round_sphere() {
            let h = conformal::h_spherical(l.field.as_ref(), &at)?;
            item["h_spherical"] = json!(h);
            csv_rows.push(vec!["h_spherical".into(), num(h)]);
        }
    }
    let mut out = Outcome::new("point");
    out.extra.push(item);
    out.csv = Some(report::csv_table(&["quantity", "value"], &csv_rows));
    Ok(out)
}

fn ray_points(s: &mut Settings, r: &RayArgs, field: &dyn ScalarField) -> Result<Vec<(f64, usize, Vec<f64>)>> {
    let n = field.dim();
    let eps = parse_list(&s.required::<String>("eps", r.eps.clone())?)?;
    if eps.is_empty() {
        return Err(GeomError::Parse("--eps needs at least one level".into()));
    }
    let rays = s.get("rays", r.rays, 16usize)?;
    let center = match s.opt::<String>("center", r.center.clone())? {
        Some(c) => parse_list(&c)?,
        None => vec![0.0; n],
    };
    let radius = s.get("radius", r.radius, field.domain().extent().unwrap_or(2.0))?;
    let sampler = RaySampler::new(center, rays, radius);
    let mut out = Vec::new();
    for e in eps {
        for (k, x) in slice_points_on_rays(field, e, &sampler)?.into_iter().enumerate() {
            out.push((e, k, x));
        }
    }
    Ok(out)
}

fn slice(s: &mut Settings, a: &SliceArgs) -> Result<Outcome> {
    let l = load_field(s, &a.f, 2)?;
    let opts = SliceOptions { delta_reg: s.tol("delta-reg", graphgeom::DEFAULT_DELTA_REG)?, level_tol: s.tol("level", graphgeom::DEFAULT_LEVEL_TOL)? };
    let minor_tol = s.tol("minor", 1e-8)?;
    let pts = ray_points(s, &a.r, l.field.as_ref())?;
    let mut res = SuiteResult::new("slice");
    let mut worst: f64 = 0.0;
    let mut worst_bar: f64 = 0.0;
    let mut data = Vec::new();
    let mut csv = Vec::new();
    for (k, (eps, ray, x)) in pts.iter().enumerate() {
        let p = graphgeom::extrinsic_point(l.field.as_ref(), &l.ambient.base, x)?;
        let status = match graphgeom::slice_from_point(&p, *eps, opts) {
            Ok(SliceOutcome::Regular(f)) => Ok(f),
            Ok(SliceOutcome::Critical { .. }) => Err("critical"),
            Err(GeomError::NonRegularPoint { .. }) => Err("non-regular"),
            Err(e) => return Err(e),
        };
        match status {
            Ok(f) => {
                res.evaluated += 1;
                let r = graphgeom::minor_relation_residual(&f, &p)?;
                worst = worst.max(r);
                if !(r <= minor_tol) {
                    res.violation(k, x, format!("minor residual {r:e}"));
                }
                let mut row = json!({
                    "eps": eps, "ray": ray, "x": x, "status": "regular",
                    "grad_norm": f.grad_norm, "cos_angle": f.cos_angle, "h_sigma": f.h_sigma,
                    "principal_sigma": f.principal_sigma, "minor_residual": r,
                });
                let (mut hb, mut rb) = (String::new(), String::new());
                if l.ambient.factor.is_some() {
                    let phi = l.ambient.phi(x, *eps)?;
                    let t = conformal::conformal_slice_trace(&f, &p, &phi)?;
                    worst_bar = worst_bar.max(t.residual);
                    if !(t.residual <= minor_tol) {
                        res.violation(k, x, format!("conformal minor residual {:e}", t.residual));
                    }
                    row["h_sigma_bar"] = json!(t.h_sigma_bar);
                    row["conformal_residual"] = json!(t.residual);
                    (hb, rb) = (num(t.h_sigma_bar), num(t.residual));
                }
                csv.push(vec![
                    num(*eps), ray.to_string(), join_numbers(x), "regular".into(), num(f.grad_norm),
                    num(f.cos_angle), num(f.h_sigma), join_numbers(&f.principal_sigma), num(r), hb, rb,
                ]);
                data.push(row);
            }
            Err(tag) => {
                res.skipped += 1;
                data.push(json!({"eps": eps, "ray": ray, "x": x, "status": tag}));
                let mut row = vec![num(*eps), ray.to_string(), join_numbers(x), tag.to_string()];
                row.resize(11, String::new());
                csv.push(row);
            }
        }
    }
    res.push(Check::le("max minor residual", worst, minor_tol));
    if l.ambient.factor.is_some() {
        res.push(Check::le("max conformal minor residual", worst_bar, minor_tol));
    }
    res.details = json!({"field": l.field.label(), "rows": data});
    let mut out = Outcome::new("slice");
    out.suites.push(res);
    out.csv = Some(report::csv_table(
        &["eps", "ray", "x", "status", "grad_norm", "cos_angle", "h_sigma", "principal_sigma", "minor_residual", "h_sigma_bar", "conformal_residual"],
        &csv,
    ));
    Ok(out)
}

fn dims_or(s: &mut Settings, flag: &Option<String>, default: &[usize]) -> Result<Vec<usize>> {
    let d = s.opt::<String>("dims", flag.clone())?;
    let v = match d {
        Some(d) => parse_ints(&d, "dims")?,
        None => default.to_vec(),
    };
    s.echo.insert("dims".into(), v.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    Ok(v)
}

fn verify(s: &mut Settings, v: &VerifyCmd, seed: u64, exec: Execution) -> Result<Outcome> {
    let (name, result) = match v {
        VerifyCmd::Identity { n, trials } => {
            let d = suite::IdentityConfig::default();
            let dims = match s.opt::<String>("n", n.clone())? {
                Some(n) => parse_ints(&n, "n")?,
                None => d.dims.clone(),
            };
            s.echo.insert("n".into(), dims.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
            let cfg = suite::IdentityConfig { dims, trials: s.get("trials", *trials, d.trials)?, seed, tol: s.tol("identity", d.tol)? };
            ("verify identity", suite::identity_suite(&cfg, exec)?)
        }
        VerifyCmd::Minor { s: size, fd_step } => {
            let d = suite::MinorConfig::default();
            let cfg = suite::MinorConfig {
                fields: s.get("fields", size.fields, d.fields)?,
                points: s.get("points", size.points, d.points)?,
                dims: dims_or(s, &size.dims, &d.dims)?,
                seed,
                fd_step: s.get("fd-step", *fd_step, d.fd_step)?,
                tol_analytic: s.tol("minor", d.tol_analytic)?,
                tol_fd: s.tol("minor-fd", d.tol_fd)?,
                min_order: s.tol("fd-order", d.min_order)?,
                ..d
            };
            ("verify minor", suite::minor_suite(&cfg, exec)?)
        }
        VerifyCmd::Gauss { s: size } => {
            let d = suite::GaussConfig::default();
            let cfg = suite::GaussConfig {
                fields: s.get("fields", size.fields, d.fields)?,
                points: s.get("points", size.points, d.points)?,
                dims: dims_or(s, &size.dims, &d.dims)?,
                seed,
                tol_flat: s.tol("gauss-flat", d.tol_flat)?,
                tol_sphere: s.tol("gauss-sphere", d.tol_sphere)?,
                ..d
            };
            ("verify gauss", suite::gauss_suite(&cfg, exec)?)
        }
        VerifyCmd::GreatSphere { points, dims } => {
            let d = suite::GreatSphereConfig::default();
            let cfg = suite::GreatSphereConfig {
                points: s.get("points", *points, d.points)?,
                dims: dims_or(s, dims, &d.dims)?,
                tol: s.tol("great-sphere", d.tol)?,
                route_tol: s.tol("route", d.route_tol)?,
                ..d
            };
            ("verify great-sphere", suite::great_sphere_suite(&cfg, exec)?)
        }
        VerifyCmd::Inequality { which, s: size, f, r } => {
            let which = parse_which(&s.get("which", which.clone(), "all".to_string())?)?;
            let d = suite::InequalityConfig::default();
            let gap_tol = s.tol("gap", d.gap_tol)?;
            if f.field.is_some() || s.opt::<String>("field", None)?.is_some() {
                ("verify inequality", inequality_on_field(s, &which, f, r, gap_tol)?)
            } else {
                let cfg = suite::InequalityConfig {
                    which,
                    fields: s.get("fields", size.fields, d.fields)?,
                    points: s.get("points", size.points, d.points)?,
                    dims: dims_or(s, &size.dims, &d.dims)?,
                    seed,
                    gap_tol,
                    equality_tol: s.tol("equality", d.equality_tol)?,
                    strict_margin: s.tol("strict", d.strict_margin)?,
                    ..d
                };
                ("verify inequality", suite::inequality_suite(&cfg, exec)?)
            }
        }
    };
    let mut out = Outcome::new(name);
    out.suites.push(result);
    Ok(out)
}

fn inequality_on_field(s: &mut Settings, which: &[Which], f: &FieldArgs, r: &RayArgs, gap_tol: f64) -> Result<SuiteResult> {
    let l = load_field(s, f, 2)?;
    let n = l.field.dim();
    let pts = ray_points(s, r, l.field.as_ref())?;
    let mut res = SuiteResult::new("inequality");
    let mut min_gap = f64::INFINITY;
    let mut reports = Vec::new();
    for &w in which {
        let ambient = if l.ambient_given { l.ambient.clone() } else { suite::suite_ambient(w, n) };
        if w == Which::Phi && ambient.factor.is_none() {
            return Err(GeomError::Parse("the phi inequality needs a conformal ambient".into()));
        }
        for (k, (eps, _, x)) in pts.iter().enumerate() {
            match inequality::check(w, l.field.as_ref(), &ambient, *eps, x) {
                Ok(rep) => {
                    res.evaluated += 1;
                    min_gap = min_gap.min(rep.gap);
                    if !(rep.gap >= -gap_tol) {
                        res.violation(k, x, format!("{}: eps {eps}, gap {:e}", w.name(), rep.gap));
                    }
                    reports.push(rep);
                }
                Err(GeomError::NonRegularPoint { .. }) => res.skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    if res.evaluated > 0 {
        res.push(Check::ge("min gap", min_gap, -gap_tol));
    }
    res.details = json!({"field": l.field.label(), "reports": reports});
    Ok(res)
}

fn barrier_cmd(s: &mut Settings, a: &BarrierArgs, exec: Execution) -> Result<Outcome> {
    let d = BarrierOptions::default();
    let mut opts = BarrierOptions {
        radial: s.get("radial", a.radial, d.radial)?,
        angular: s.get("angular", a.angular, d.angular)?,
        bisect_tol: s.tol("bisect", d.bisect_tol)?,
        touch_tol: s.tol("touch", d.touch_tol)?,
        gradient_tol: s.tol("gradient", d.gradient_tol)?,
        exec,
    };
    let margin = s.tol("boundary-margin", barrier::DEFAULT_BOUNDARY_MARGIN)?;
    let negate = s.switch("negate", a.negate)?;
    let mut out = Outcome::new("barrier");
    let Some(spec) = s.opt::<String>("field", a.field.clone())? else {
        if negate {
            return Err(GeomError::Parse("--negate needs --field".into()));
        }
        let cfg = suite::BarrierSuiteConfig { opts, ring_tol: s.tol("ring", 1e-8)?, margin };
        out.suites.push(suite::barrier_suite(&cfg)?);
        return Ok(out);
    };
    let dim = s.get("dim", a.dim, 2)?;
    let field = parse_field(&spec, dim)?;
    let field: Box<dyn ScalarField> = if negate { Box::new(Scaled { inner: field, factor: -1.0 }) } else { field };
    if field.dim() > 2 {
        opts.angular = opts.angular.max(256);
    }
    let a_in = s.get("a", a.a, 0.5)?;
    let a_prime = s.get("a-prime", a.a_prime, a_in + 0.2 * (1.0 - a_in))?;
    let lambda_max = s.get("lambda-max", a.lambda_max, 50.0)?;
    let run = barrier::slide(field.as_ref(), a_in, a_prime, lambda_max, &opts)?;
    let mut res = SuiteResult::new("barrier");
    res.evaluated = 1;
    res.push(Check::holds("start above field", run.start_ok));
    res.push(Check::holds("interior touch found", run.successful));
    let bounds = barrier::comparison_bounds(&run, run.n, margin);
    if run.successful {
        res.push(Check::holds("gradient bound", run.gradient_bound_holds));
        if let Ok(b) = &bounds {
            res.push(Check::holds("upper within cap", b.upper_within_cap));
            if b.ordering_checked {
                res.push(Check::holds("lower exceeds cap", b.ordering_holds));
            }
        }
    } else {
        let why = if run.degenerate { "degenerate: max u = 0" } else if !run.start_ok { "lambda-max too small" } else { "touch on the sampled boundary" };
        res.violation(0, &run.x0, why.into());
    }
    res.details = json!({
        "field": field.label(),
        "run": run,
        "bounds": bounds.as_ref().ok(),
        "bounds_error": bounds.as_ref().err().map(|e| e.to_string()),
    });
    out.suites.push(res);
    Ok(out)
}

fn example(s: &mut Settings, a: &ExampleArgs, exec: Execution) -> Result<Outcome> {
    let name = s.required::<String>("name", a.name.clone())?;
    match name.as_str() {
        "spherical-glued" => {
            let av = s.get("a", a.a, 0.5)?;
            let samples = s.get("samples", a.samples, 1000usize)?;
            let (res, sweep) = suite::glued_suite(av, samples, exec)?;
            let mut out = Outcome::new("example spherical-glued");
            out.csv = Some(report::glued_csv(&sweep));
            out.suites.push(res);
            out.extra.push(json!({"sweep": sweep}));
            Ok(out)
        }
        "euclid-cone" => {
            let samples = s.get("samples", a.samples, 1000usize)?;
            let (res, sweep) = suite::euclid_cone_suite(samples, exec)?;
            let mut out = Outcome::new("example euclid-cone");
            out.csv = Some(report::euclid_csv(&sweep));
            out.suites.push(res);
            out.extra.push(json!({"sweep": sweep}));
            Ok(out)
        }
        other => Err(GeomError::Parse(format!("unknown example '{other}' (euclid-cone|spherical-glued)"))),
    }
}
