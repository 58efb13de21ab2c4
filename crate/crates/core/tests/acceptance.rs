//! One PASS/FAIL line per acceptance criterion. Each criterion also has a
//! wall-clock budget; exceeding it fails the criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use curv::barrier;
use curv::par::Execution;
use curv::report::Report;
use curv::revolution;
use curv::suite::{self, SuiteResult};

struct Outcome {
    pass: bool,
    note: String,
}

fn from_suite(r: &SuiteResult, extra: &[(bool, String)]) -> Outcome {
    let mut notes: Vec<String> = r.failures().iter().map(|c| format!("{} = {} (limit {})", c.name, c.value, c.limit)).collect();
    let mut pass = r.pass;
    for (ok, msg) in extra {
        if !ok {
            pass = false;
            notes.push(msg.clone());
        }
    }
    let note = if notes.is_empty() { format!("{} checks, {} items", r.checks.len(), r.evaluated) } else { notes.join("; ") };
    Outcome { pass, note }
}

fn value(r: &SuiteResult, name: &str) -> f64 {
    r.check(name).map_or(f64::NAN, |c| c.value)
}

fn criterion(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took >= budget {
        o.pass = false;
        o.note = format!("{}; runtime {:.2?} over budget {:.0?}", o.note, took, budget);
    }
    println!("{} criterion {id}: {title} [{:.2?} / {:.0?}] {}", if o.pass { "PASS" } else { "FAIL" }, took, budget, o.note);
    o.pass
}

fn identity() -> Outcome {
    let cfg = suite::IdentityConfig::default();
    assert_eq!(cfg.trials, 100_000);
    let r = suite::identity_suite(&cfg, Execution::Parallel).unwrap();
    let mut o = from_suite(&r, &[]);
    o.note = format!("max scaled residual {:e} over n = 2..8; {}", value(&r, "max scaled residual"), o.note);
    o
}

fn minor() -> Outcome {
    let r = suite::minor_suite(&suite::MinorConfig::default(), Execution::Parallel).unwrap();
    let orders = (value(&r, "fd order h to h/2"), value(&r, "fd order h/2 to h/4"));
    let mut o = from_suite(&r, &[(r.evaluated == 50 * 20, format!("expected 1000 slice points, got {}", r.evaluated))]);
    o.note = format!("analytic max {:e}, observed fd orders {:.3}/{:.3}; {}", value(&r, "max analytic residual"), orders.0, orders.1, o.note);
    o
}

fn gauss() -> Outcome {
    let r = suite::gauss_suite(&suite::GaussConfig::default(), Execution::Parallel).unwrap();
    let mut o = from_suite(&r, &[]);
    o.note = format!("flat {:e}, sphere base {:e}; {}", value(&r, "max flat-base error"), value(&r, "max sphere-base error"), o.note);
    o
}

fn great_sphere() -> Outcome {
    let r = suite::great_sphere_suite(&suite::GreatSphereConfig::default(), Execution::Parallel).unwrap();
    let mut o = from_suite(&r, &[]);
    o.note = format!("max |H| {:e}, route {:e}; {}", value(&r, "max |H|"), value(&r, "max route difference"), o.note);
    o
}

fn inequalities() -> Outcome {
    let r = suite::inequality_suite(&suite::InequalityConfig::default(), Execution::Parallel).unwrap();
    let need = [
        "euclid paraboloid (1,0): equality detected",
        "euclid round sphere n=3: equality detected",
        "sphere geodesic sphere n=2: equality detected",
        "phi geodesic sphere n=3: equality detected",
        "euclid anisotropic cup gap",
    ];
    let extra: Vec<(bool, String)> = need.iter().map(|n| (r.check(n).is_some(), format!("missing check '{n}'"))).collect();
    let mut o = from_suite(&r, &extra);
    o.note = format!("min gap {:e}, cup gap {:.4}; {}", value(&r, "min gap over random fields"), value(&r, "euclid anisotropic cup gap"), o.note);
    o
}

fn glued() -> Outcome {
    let (r, sweep) = suite::glued_suite(0.5, 10_000, Execution::Parallel).unwrap();
    let k = revolution::cap_curvature(0.5).unwrap();
    let cap_r = revolution::cap_scalar_curvature(0.5).unwrap();
    let j = revolution::junction_c2_check(0.5, &revolution::default_junction_radii()).unwrap();
    let min_r = sweep.iter().map(|s| s.scalar).fold(f64::INFINITY, f64::min);
    let extra = [
        (k == -0.125, format!("cap curvature {k}")),
        (cap_r == 2.03125, format!("cap R {cap_r}")),
        (sweep.iter().filter(|s| s.piece == "v").all(|s| s.scalar == 2.03125), "cap rows must carry R = 2.03125".into()),
        ((j.lambda2_limit.abs() - 0.125).abs() <= 1e-3, format!("junction |lambda2| limit {}", j.lambda2_limit)),
        (min_r >= 2.0 - 1e-10, format!("min R {min_r}")),
    ];
    let mut o = from_suite(&r, &extra);
    o.note = format!("kappa {k}, cap R {cap_r}, min R {min_r}, junction |lambda| {:.6}/{:.6}; {}", j.lambda1_limit.abs(), j.lambda2_limit.abs(), o.note);
    o
}

fn euclid() -> Outcome {
    let (r, sweep) = suite::euclid_cone_suite(1000, Execution::Parallel).unwrap();
    let mut o = from_suite(&r, &[(sweep.len() == 1000, "expected 1000 samples".into())]);
    o.note = format!("min K {:e}; {}", value(&r, "min Gauss curvature"), o.note);
    o
}

fn barrier_machinery() -> Outcome {
    let r = suite::barrier_suite(&suite::BarrierSuiteConfig::default()).unwrap();
    let pair = barrier::bounds_at(0.5, 0.0, 1.0, 2, barrier::DEFAULT_BOUNDARY_MARGIN).unwrap();
    let extra = [
        (pair.cap == 0.5 && pair.lower == 0.75, format!("bound pair ({}, {})", pair.cap, pair.lower)),
        (pair.lower > pair.cap, "strict ordering".into()),
    ];
    let mut o = from_suite(&r, &extra);
    o.note = format!(
        "{} successful slides, ring error {:e}, pair (cap {}, lower {}); {}",
        value(&r, "successful slides"),
        value(&r, "ring curvature vs slice route"),
        pair.cap,
        pair.lower,
        o.note
    );
    o
}

fn suite_bytes(exec: Execution) -> Vec<String> {
    let small_minor = suite::MinorConfig { fields: 6, points: 5, ..Default::default() };
    let small_ineq = suite::InequalityConfig { fields: 10, points: 4, ..Default::default() };
    let results = [
        suite::identity_suite(&suite::IdentityConfig { trials: 5000, ..Default::default() }, exec).unwrap(),
        suite::minor_suite(&small_minor, exec).unwrap(),
        suite::gauss_suite(&suite::GaussConfig { fields: 6, ..Default::default() }, exec).unwrap(),
        suite::great_sphere_suite(&suite::GreatSphereConfig { points: 100, ..Default::default() }, exec).unwrap(),
        suite::inequality_suite(&small_ineq, exec).unwrap(),
        suite::barrier_suite(&suite::BarrierSuiteConfig::default()).unwrap(),
        suite::glued_suite(0.5, 500, exec).unwrap().0,
        suite::euclid_cone_suite(200, exec).unwrap().0,
    ];
    results
        .iter()
        .map(|r| {
            let mut rep = Report::new(r.suite.clone(), 42);
            rep.push(r).unwrap();
            rep.to_json().unwrap()
        })
        .collect()
}

fn cli_bytes(dir: &std::path::Path, tag: &str, extra: &[&str]) -> Vec<Vec<u8>> {
    let bin = env!("CARGO_BIN_EXE_curv");
    let runs: [&[&str]; 4] = [
        &["verify", "identity", "--n", "4", "--trials", "2000", "--seed", "42"],
        &["verify", "inequality", "--which", "euclid,sphere", "--fields", "5", "--points", "3", "--seed", "7"],
        &["barrier"],
        &["example", "--name", "spherical-glued", "--a", "0.5", "--samples", "200"],
    ];
    runs.iter()
        .enumerate()
        .map(|(i, args)| {
            let path = dir.join(format!("{tag}-{i}.json"));
            let status = Command::new(bin).args(*args).args(extra).arg("--out").arg(&path).status().unwrap();
            assert_eq!(status.code(), Some(0), "{args:?}");
            std::fs::read(&path).unwrap()
        })
        .collect()
}

fn determinism() -> Outcome {
    let a = suite_bytes(Execution::Parallel);
    let b = suite_bytes(Execution::Parallel);
    let c = suite_bytes(Execution::Sequential);
    let dir = tempfile::tempdir().unwrap();
    let x = cli_bytes(dir.path(), "first", &[]);
    let y = cli_bytes(dir.path(), "second", &[]);
    let z = cli_bytes(dir.path(), "sequential", &["--sequential"]);
    let mut notes = Vec::new();
    for (i, ((p, q), s)) in a.iter().zip(&b).zip(&c).enumerate() {
        if p != q {
            notes.push(format!("suite report {i} differs between runs"));
        }
        if p != s {
            notes.push(format!("suite report {i} differs between parallel and sequential"));
        }
    }
    for (i, ((p, q), s)) in x.iter().zip(&y).zip(&z).enumerate() {
        if p != q || p != s {
            notes.push(format!("cli report {i} differs"));
        }
    }
    Outcome {
        pass: notes.is_empty(),
        note: if notes.is_empty() { format!("{} suite reports and {} cli reports byte-identical across reruns and execution modes", a.len(), x.len()) } else { notes.join("; ") },
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "algebraic identity on 1e5 random matrices", s(5), identity),
        criterion(2, "minor relation, worked example and seeded fields", s(30), minor),
        criterion(3, "Gauss equation against intrinsic curvature", s(60), gauss),
        criterion(4, "great spheres have zero mean curvature", s(5), great_sphere),
        criterion(5, "slice inequality suites", s(120), inequalities),
        criterion(6, "glued spherical example values", s(10), glued),
        criterion(7, "Euclidean example curvature sign and endpoints", s(2), euclid),
        criterion(8, "barrier machinery", s(10), barrier_machinery),
        criterion(9, "determinism of reports", s(120), determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
