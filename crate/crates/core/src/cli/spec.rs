//! The field and ambient mini-language.
//!
//! Fields are `name[:p1[,p2...]]`:
//!
//! | spec | field |
//! |---|---|
//! | `paraboloid[:n]` | `|x|²/2` |
//! | `cup:w1,...,wn` | `Σ wᵢxᵢ²/2` |
//! | `hemisphere[:ρ]` | `√(ρ² − |x|²)` |
//! | `cap:ρ[,c[,sign]]` | `c ± √(ρ² − |x|²)`, sign `+`/`-` |
//! | `plane:c0,s1,...,sn` | `c0 + s·x` |
//! | `zero` | `0` |
//! | `poly:n,deg,c...` | graded-lex coefficients |
//! | `random:seed[,n]` | seeded random smooth field |
//! | `radial:u:a`, `radial:v:a`, `radial:f` | revolution profiles over ℝ² |
//! | `radial:bump:a[,h[,p]]` | `h (r−a)^p (1−r)^p` |
//! | `grid:<path>` | sampled grid file |
//! | `fd:<spec>` | the same field with finite-difference derivatives |
//!
//! Where a spec does not fix the dimension, the caller's hint is used.

use std::path::Path;
use std::sync::Arc;

use crate::barrier::Bump;
use crate::error::{GeomError, Result};
use crate::fields::{
    Affine, AmbientSpec, BaseMetric, ConformalFactor, FiniteDifference, GridField, Polynomial, Quadratic, RadialField,
    ScalarField, SphereCap,
};
use crate::revolution::RevolutionProfile;
use crate::sampling::random_field;
use crate::suite::bowl_factor;

fn parse_err(msg: impl Into<String>) -> GeomError {
    GeomError::Parse(msg.into())
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| parse_err(format!("'{t}' is not a number"))))
        .collect()
}

fn params(rest: Option<&str>) -> Result<Vec<f64>> {
    rest.map_or(Ok(Vec::new()), parse_list)
}

fn int(v: f64, what: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(parse_err(format!("{what} must be a non-negative integer, got {v}")))
    }
}

fn want_dim(n: usize) -> Result<usize> {
    if n == 0 {
        Err(GeomError::InvalidDimension { got: n, reason: "fields need n ≥ 1" })
    } else {
        Ok(n)
    }
}

/// Parses a field spec. `dim` is used by specs without an intrinsic dimension.
pub fn parse_field(spec: &str, dim: usize) -> Result<Box<dyn ScalarField>> {
    let spec = spec.trim();
    if let Some(inner) = spec.strip_prefix("fd:") {
        return Ok(Box::new(FiniteDifference::new(parse_field(inner, dim)?)));
    }
    if let Some(path) = spec.strip_prefix("grid:") {
        return Ok(Box::new(GridField::read(Path::new(path))?));
    }
    let (name, rest) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    if name == "radial" {
        return parse_radial(rest.unwrap_or(""));
    }
    let p = match (name, rest) {
        ("cap", Some(r)) => params(Some(&r.split(',').take(2).collect::<Vec<_>>().join(",")))?,
        _ => params(rest)?,
    };
    let field: Box<dyn ScalarField> = match name {
        "paraboloid" => {
            let n = match p.as_slice() {
                [] => dim,
                [n] => int(*n, "dimension")?,
                _ => return Err(parse_err("paraboloid takes at most a dimension")),
            };
            Box::new(Quadratic::paraboloid(want_dim(n)?))
        }
        "cup" => {
            if p.is_empty() {
                return Err(parse_err("cup needs weights"));
            }
            Box::new(Quadratic { weights: p })
        }
        "hemisphere" | "cap" => {
            let radius = p.first().copied().unwrap_or(1.0);
            let center_height = p.get(1).copied().unwrap_or(0.0);
            let sign = match rest.and_then(|r| r.split(',').nth(2)).map(str::trim) {
                None | Some("+") | Some("1") | Some("+1") => true,
                Some("-") | Some("-1") => false,
                Some(s) => return Err(parse_err(format!("cap sign must be + or -, got '{s}'"))),
            };
            if name == "hemisphere" && p.len() > 1 {
                return Err(parse_err("hemisphere takes only a radius"));
            }
            if name == "cap" && p.is_empty() {
                return Err(parse_err("cap needs a radius"));
            }
            if !(radius > 0.0) {
                return Err(GeomError::ParameterOutOfRange { name: "radius", value: radius, expected: "> 0" });
            }
            Box::new(SphereCap { n: want_dim(dim)?, radius, center_height, upper: sign })
        }
        "plane" => {
            if p.len() < 2 {
                return Err(parse_err("plane needs a constant and at least one slope"));
            }
            Box::new(Affine { constant: p[0], slope: p[1..].to_vec() })
        }
        "zero" => {
            if !p.is_empty() {
                return Err(parse_err("zero takes no parameters"));
            }
            Box::new(Affine::constant(want_dim(dim)?, 0.0))
        }
        "poly" => {
            if p.len() < 3 {
                return Err(parse_err("poly needs n, degree and coefficients"));
            }
            let n = want_dim(int(p[0], "dimension")?)?;
            let deg = int(p[1], "degree")? as u32;
            let poly = Polynomial::from_graded_coefficients(n, deg, &p[2..])
                .ok_or_else(|| parse_err("too many coefficients for the degree"))?;
            Box::new(poly)
        }
        "random" => {
            let seed = int(*p.first().ok_or_else(|| parse_err("random needs a seed"))?, "seed")? as u64;
            let n = match p.get(1) {
                Some(n) => int(*n, "dimension")?,
                None => dim,
            };
            Box::new(random_field(seed, want_dim(n)?))
        }
        other => return Err(parse_err(format!("unknown field '{other}'"))),
    };
    Ok(field)
}

fn parse_radial(rest: &str) -> Result<Box<dyn ScalarField>> {
    let (profile, args) = match rest.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (rest, None),
    };
    let p = params(args)?;
    let field = match profile {
        "u" | "v" => {
            let a = *p.first().ok_or_else(|| parse_err("radial profile needs a"))?;
            let prof = if profile == "u" { RevolutionProfile::SphereU { a } } else { RevolutionProfile::SphereV { a } };
            prof.validate()?;
            RadialField::new(2, Arc::new(prof))
        }
        "f" => RadialField::new(2, Arc::new(RevolutionProfile::EuclidF)),
        "bump" => {
            let a = *p.first().ok_or_else(|| parse_err("bump needs a"))?;
            if !(0.0..1.0).contains(&a) {
                return Err(GeomError::ParameterOutOfRange { name: "a", value: a, expected: "0 ≤ a < 1" });
            }
            let height = p.get(1).copied().unwrap_or(1.0);
            let power = match p.get(2) {
                None => 2,
                Some(v) if *v == 1.0 || *v == 2.0 => *v as u32,
                Some(v) => return Err(GeomError::ParameterOutOfRange { name: "p", value: *v, expected: "1 or 2" }),
            };
            return Ok(Box::new(Bump { a, height, power }.field(2)));
        }
        other => return Err(parse_err(format!("unknown radial profile '{other}' (u|v|f|bump)"))),
    };
    Ok(Box::new(field))
}

/// `flat`, `spherical` (round sphere as a conformal product), `sphere-base`
/// (product of the round sphere with a line), `conformal:bowl`, or
/// `conformal:const:<c>`.
pub fn parse_ambient(spec: &str, n: usize) -> Result<AmbientSpec> {
    let spec = spec.trim();
    match spec {
        "flat" => Ok(AmbientSpec::product(BaseMetric::flat(n))),
        "spherical" | "sphere" => Ok(AmbientSpec::round_sphere(n)),
        "sphere-base" => Ok(AmbientSpec::product(BaseMetric::round_sphere(n))),
        "conformal:bowl" => Ok(AmbientSpec::conformal(BaseMetric::flat(n), bowl_factor())),
        _ => {
            if let Some(c) = spec.strip_prefix("conformal:const:") {
                let c: f64 = c.trim().parse().map_err(|_| parse_err(format!("bad constant '{c}'")))?;
                if !(c > 0.0) {
                    return Err(GeomError::NonPositiveFactor(c));
                }
                return Ok(AmbientSpec::conformal(BaseMetric::flat(n), ConformalFactor::Constant(c)));
            }
            Err(parse_err(format!(
                "unknown ambient '{spec}' (flat|spherical|sphere-base|conformal:bowl|conformal:const:<c>)"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        assert_eq!(parse_field("paraboloid", 3).unwrap().dim(), 3);
        assert_eq!(parse_field("paraboloid:2", 3).unwrap().dim(), 2);
        assert_eq!(parse_field("cup:1,4,9", 2).unwrap().dim(), 3);
        let h = parse_field("hemisphere:1", 2).unwrap();
        assert!((h.value(&[0.6, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        let c = parse_field("cap:2,1,-", 2).unwrap();
        assert!((c.value(&[0.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(parse_field("plane:1,2,3", 9).unwrap().value(&[1.0, 1.0]).unwrap(), 6.0);
        assert_eq!(parse_field("poly:2,2,0,0,0,1,0,1", 9).unwrap().value(&[1.0, 2.0]).unwrap(), 5.0);
        assert_eq!(parse_field("random:3,4", 2).unwrap().dim(), 4);
        assert!(parse_field("radial:u:0.5", 2).unwrap().value(&[0.75, 0.0]).is_ok());
        assert!(!parse_field("fd:paraboloid", 2).unwrap().is_analytic());
        assert_eq!(parse_field("zero", 3).unwrap().value(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn bad_specs() {
        for s in ["torus", "cup", "cap", "cap:-1", "cap:1,0,x", "plane:1", "poly:2,1,1,2,3,4", "radial:w:0.5", "radial:u:1.5", "random", "paraboloid:x"] {
            assert!(parse_field(s, 2).is_err(), "{s}");
        }
        assert!(matches!(parse_field("grid:/nonexistent/file.csv", 2), Err(GeomError::Io(_))));
    }

    #[test]
    fn ambients() {
        assert!(parse_ambient("spherical", 2).unwrap().is_round_sphere());
        assert!(!parse_ambient("sphere-base", 2).unwrap().is_round_sphere());
        assert!(parse_ambient("conformal:const:2", 2).is_ok());
        assert!(parse_ambient("conformal:const:-2", 2).is_err());
        assert!(parse_ambient("hyperbolic", 2).is_err());
    }
}
