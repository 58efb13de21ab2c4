//! `key = value` config files merged under command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{GeomError, Result};

/// Smallest tolerance a user may request.
pub const TOLERANCE_FLOOR: f64 = 1e-14;

/// Keys a config file may set. Tolerances use `tol.<name>`.
pub const KNOWN_KEYS: &[&str] = &[
    "seed", "out", "format", "sequential", "field", "ambient", "at", "dim", "eps", "rays", "center", "radius", "n",
    "dims", "trials", "fields", "points", "fd-step", "which", "a", "a-prime", "lambda-max", "radial", "angular",
    "negate", "name", "samples",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    file: BTreeMap<String, String>,
    tol_flags: BTreeMap<String, f64>,
    /// Effective values, echoed into the report.
    pub echo: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| GeomError::Parse(format!("config line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !(KNOWN_KEYS.contains(&k.as_str()) || k.starts_with("tol.")) {
            return Err(GeomError::Parse(format!("config line {}: unknown key '{k}'", i + 1)));
        }
        out.insert(k, v);
    }
    Ok(out)
}

fn check_tolerance(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || v < TOLERANCE_FLOOR {
        return Err(GeomError::ParameterOutOfRange { name: "tolerance", value: v, expected: "finite and ≥ 1e-14" })
            .map_err(|e| GeomError::Parse(format!("tolerance '{name}': {e}")));
    }
    Ok(v)
}

impl Settings {
    pub fn new(config: Option<&Path>, tol_flags: &[String]) -> Result<Self> {
        let file = match config {
            Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
            None => BTreeMap::new(),
        };
        let mut tols = BTreeMap::new();
        for t in tol_flags {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| GeomError::Parse(format!("--tol expects name=value, got '{t}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| GeomError::Parse(format!("bad tolerance value in '{t}'")))?;
            tols.insert(k.trim().to_string(), check_tolerance(k, v)?);
        }
        Ok(Self { file, tol_flags: tols, ..Default::default() })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    /// The flag if given, else the config value, else `None`; the result is echoed.
    pub fn opt<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.raw(key) {
                Some(s) => Some(s.parse::<T>().map_err(|_| GeomError::Parse(format!("config key '{key}': bad value '{s}'")))?),
                None => None,
            },
        };
        if let Some(v) = &v {
            self.echo.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn get<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.echo.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn required<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        self.opt(key, flag)?.ok_or_else(|| GeomError::Parse(format!("missing required option '{key}'")))
    }

    /// A boolean switch: set by the flag or by `key = true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let v = flag
            || match self.raw(key) {
                Some(s) => s.parse::<bool>().map_err(|_| GeomError::Parse(format!("config key '{key}': expected true or false")))?,
                None => false,
            };
        if v {
            self.echo.insert(key.to_string(), "true".into());
        }
        Ok(v)
    }

    pub fn tol(&mut self, name: &str, default: f64) -> Result<f64> {
        let v = match self.tol_flags.get(name) {
            Some(v) => *v,
            None => match self.raw(&format!("tol.{name}")) {
                Some(s) => check_tolerance(name, s.parse().map_err(|_| GeomError::Parse(format!("bad tolerance '{s}'")))?)?,
                None => default,
            },
        };
        self.tolerances.insert(name.to_string(), v);
        Ok(v)
    }

    /// Tolerance names given on the command line or in the file but never read.
    pub fn unused_tolerances(&self) -> Vec<String> {
        let file = self.file.keys().filter_map(|k| k.strip_prefix("tol."));
        self.tol_flags
            .keys()
            .map(String::as_str)
            .chain(file)
            .filter(|k| !self.tolerances.contains_key(*k))
            .map(str::to_owned)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# comment\nseed = 7\n\nfield = cup:1,2 # trailing\ntol.gap=1e-9\n").unwrap();
        assert_eq!(m["seed"], "7");
        assert_eq!(m["field"], "cup:1,2");
        assert_eq!(m["tol.gap"], "1e-9");
        assert!(parse_config("nonsense\n").is_err());
        assert!(parse_config("colour = red\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings { file: parse_config("seed = 7\ntrials = 10\n").unwrap(), ..Default::default() };
        assert_eq!(s.get("seed", Some(9u64), 0).unwrap(), 9);
        assert_eq!(s.get("trials", None::<usize>, 1).unwrap(), 10);
        assert_eq!(s.get("points", None::<usize>, 3).unwrap(), 3);
        assert_eq!(s.echo["seed"], "9");
    }

    #[test]
    fn tolerance_floor() {
        assert!(Settings::new(None, &["gap=1e-15".into()]).is_err());
        assert!(Settings::new(None, &["gap=1e-14".into()]).is_ok());
        assert!(Settings::new(None, &["gap".into()]).is_err());
        let mut s = Settings { file: parse_config("tol.gap = 1e-20\n").unwrap(), ..Default::default() };
        assert!(s.tol("gap", 1e-8).is_err());
        let mut s = Settings::new(None, &["gap=1e-9".into(), "typo=1e-3".into()]).unwrap();
        assert_eq!(s.tol("gap", 1e-8).unwrap(), 1e-9);
        assert_eq!(s.unused_tolerances(), vec!["typo".to_string()]);
    }
}
