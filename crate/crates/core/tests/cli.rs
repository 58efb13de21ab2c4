use std::process::{Command, Output};

use curv::fields::GridField;
use serde_json::Value;

fn curv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curv")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn hemisphere_in_round_sphere_is_minimal() {
    let out = curv(&["point", "--field", "hemisphere:1", "--ambient", "spherical", "--at", "0.3,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["meta"]["command"], "point");
    let h = v["results"][0]["h_spherical"].as_f64().unwrap();
    assert!(h.abs() <= 1e-10, "{h}");
    assert_eq!(v["results"][0]["conformal"]["scalar_curvature"].as_f64().unwrap(), 2.0);
}

#[test]
fn paraboloid_point_values() {
    let v = json(&curv(&["point", "--field", "paraboloid:2", "--at", "1,0"]));
    let r = &v["results"][0];
    assert!((r["grad_norm"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    let mut k: Vec<f64> = r["principal_curvatures"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    k.sort_by(f64::total_cmp);
    let s = 2f64.sqrt();
    assert!((k[0] - 1.0 / (2.0 * s)).abs() < 1e-12 && (k[1] - 1.0 / s).abs() < 1e-12, "{k:?}");
}

#[test]
fn verify_identity_passes() {
    let out = curv(&["verify", "identity", "--n", "3", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["results"][0]["pass"], true);
}

#[test]
fn glued_example_csv() {
    let out = curv(&["example", "--name", "spherical-glued", "--a", "0.5", "--samples", "100", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "piece,r,value,lambda1,lambda2,R");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    let min = rows.iter().map(|r| r[5].parse::<f64>().unwrap()).fold(f64::INFINITY, f64::min);
    assert!((min - 2.0).abs() < 1e-10, "{min}");
    let first_u = rows.iter().find(|r| r[0] == "u").unwrap();
    assert_eq!(first_u[1].parse::<f64>().unwrap(), 0.5);
    assert!(rows.iter().filter(|r| r[0] == "v").all(|r| r[5].parse::<f64>().unwrap() == 2.03125));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(curv(&["point", "--field", "torus", "--at", "0,0"]).status.code(), Some(2));
    assert_eq!(curv(&["verify", "identity", "--tol", "residual=1e-20"]).status.code(), Some(2));
    assert_eq!(curv(&["verify", "identity", "--tol", "no-such-tolerance=1e-3", "--trials", "10"]).status.code(), Some(2));
    assert_eq!(curv(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(curv(&["barrier", "--negate"]).status.code(), Some(2));
    assert_eq!(curv(&["point", "--config", "/nonexistent.conf", "--field", "zero", "--at", "0"]).status.code(), Some(2));
    assert_eq!(curv(&["--help"]).status.code(), Some(0));
    assert_eq!(curv(&["--version"]).status.code(), Some(0));
}

#[test]
fn boundary_touch_exits_one() {
    let out = curv(&["barrier", "--field", "radial:bump:0.5,2,1", "--a", "0.5"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("interior touch"));
}

#[test]
fn interior_bump_barrier_passes() {
    let out = curv(&["barrier", "--field", "radial:bump:0.5", "--a", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# identity run\ntrials = 300\nn = 2\nseed = 5\n").unwrap();
    let c = conf.to_str().unwrap();
    let v = json(&curv(&["verify", "identity", "--config", c]));
    assert_eq!(v["meta"]["config"]["trials"], "300");
    assert_eq!(v["meta"]["seed"], 5);
    let v = json(&curv(&["verify", "identity", "--config", c, "--seed", "9"]));
    assert_eq!(v["meta"]["seed"], 9);
    std::fs::write(&conf, "colour = red\n").unwrap();
    assert_eq!(curv(&["verify", "identity", "--config", c]).status.code(), Some(2));
}

#[test]
fn grid_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cup.csv");
    let g = GridField::sample(|x| 0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]), 0.05, vec![-1.0, -1.0], vec![41, 41]).unwrap();
    g.write(&path).unwrap();
    let back = GridField::read(&path).unwrap();
    assert_eq!(back.to_csv(), g.to_csv());
    let spec = format!("grid:{}", path.display());
    let grid = json(&curv(&["point", "--field", &spec, "--at", "0.2,0.1"]));
    let exact = json(&curv(&["point", "--field", "cup:1,4", "--at", "0.2,0.1"]));
    let h = |v: &Value| v["results"][0]["mean_curvature"].as_f64().unwrap();
    assert!((h(&grid) - h(&exact)).abs() < 1e-10, "{} vs {}", h(&grid), h(&exact));
}

#[test]
fn output_file_extension_selects_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = curv(&["example", "--name", "euclid-cone", "--samples", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("z,f,K,R\n"));
    assert_eq!(text.lines().count(), 11);
}
