//! Deterministic point sets and seeded random fields for the suites.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::fields::{graded_exponents, FiniteDifference, Polynomial, ScalarField, SumField, TrigSum, Wave};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// The `index`-th point of the Halton sequence in `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|d| radical_inverse(index, PRIMES[d % PRIMES.len()])).collect()
}

/// `count` unit vectors in `ℝⁿ`: equally spaced angles for `n = 2`, Halton
/// points pushed through Box–Muller and normalized otherwise.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => (0..count).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let pairs = n.div_ceil(2);
            (0..count)
                .map(|i| {
                    let h = halton(i as u64 + 1, 2 * pairs);
                    let mut v = Vec::with_capacity(2 * pairs);
                    for p in 0..pairs {
                        let rad = (-2.0 * (1.0 - h[2 * p]).ln()).sqrt();
                        let ang = 2.0 * PI * h[2 * p + 1];
                        v.push(rad * ang.cos());
                        v.push(rad * ang.sin());
                    }
                    v.truncate(n);
                    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if len > 0.0 {
                        v.iter_mut().for_each(|x| *x /= len);
                    } else {
                        v[0] = 1.0;
                    }
                    v
                })
                .collect()
        }
    }
}

/// Ray search settings for [`slice_points_on_rays`].
#[derive(Debug, Clone, PartialEq)]
pub struct RaySampler {
    pub center: Vec<f64>,
    pub rays: usize,
    pub max_radius: f64,
    pub scan_steps: usize,
}

impl RaySampler {
    pub fn new(center: Vec<f64>, rays: usize, max_radius: f64) -> Self {
        Self { center, rays, max_radius, scan_steps: 256 }
    }
}

/// Points of `{u = ε}`: along each ray from the center, the first sign change
/// of `u − ε` refined by bisection. Rays without a crossing inside the domain
/// are skipped; the order follows the ray index.
pub fn slice_points_on_rays(field: &dyn ScalarField, eps: f64, sampler: &RaySampler) -> Result<Vec<Vec<f64>>> {
    let n = field.dim();
    if sampler.center.len() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: sampler.center.len() });
    }
    if sampler.rays == 0 || sampler.scan_steps == 0 || !(sampler.max_radius > 0.0) {
        return Err(GeomError::EmptyDomain("ray sampler needs rays, steps and a positive radius".into()));
    }
    let mut out = Vec::new();
    for dir in sphere_directions(n, sampler.rays) {
        let at = |s: f64| -> Vec<f64> { sampler.center.iter().zip(&dir).map(|(c, d)| c + s * d).collect() };
        let g = |s: f64| -> Option<f64> { field.value(&at(s)).ok().map(|v| v - eps) };
        let ds = sampler.max_radius / sampler.scan_steps as f64;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=sampler.scan_steps {
            let s = k as f64 * ds;
            let Some(v) = g(s) else {
                prev = None;
                continue;
            };
            if v == 0.0 {
                out.push(at(s));
                break;
            }
            if let Some((s0, v0)) = prev {
                if v0.signum() != v.signum() {
                    let (mut lo, mut hi, mut flo) = (s0, s, v0);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        let Some(fm) = g(mid) else { break };
                        if fm == 0.0 {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        if fm.signum() == flo.signum() {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    let s_star = if g(lo).map(f64::abs) <= g(hi).map(f64::abs) { lo } else { hi };
                    out.push(at(s_star));
                    break;
                }
            }
            prev = Some((s, v));
        }
    }
    Ok(out)
}

/// Seeded random smooth field on `ℝⁿ`: a polynomial of degree ≤ 3 plus two
/// plane waves.
pub fn random_field(seed: u64, n: usize) -> SumField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exps = graded_exponents(n, 3);
    let coefs: Vec<f64> = exps
        .iter()
        .map(|e| {
            let deg: u32 = e.iter().sum();
            match deg {
                0 => 0.0,
                1 | 2 => rng.random_range(-1.0..1.0),
                _ => rng.random_range(-0.5..0.5),
            }
        })
        .collect();
    let poly = Polynomial::from_graded_coefficients(n, 3, &coefs).expect("coefficient count matches");
    let waves = (0..2)
        .map(|_| Wave {
            amplitude: rng.random_range(-0.3..0.3),
            wavevector: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .collect();
    SumField { parts: vec![Box::new(poly), Box::new(TrigSum { n, waves })] }
}

/// The same random field with finite-difference derivatives of step `h`.
pub fn random_field_fd(seed: u64, n: usize, h: f64) -> FiniteDifference<SumField> {
    FiniteDifference::with_step(random_field(seed, n), h)
}

/// `count` seeded points in the ball of radius `radius` where `|∇u| ≥ min_grad`.
/// The slice through each is `ε = u(x)`.
pub fn random_regular_points(
    field: &dyn ScalarField,
    seed: u64,
    count: usize,
    radius: f64,
    min_grad: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(GeomError::EmptyDomain(format!("found only {} regular points of {count}", out.len())));
        }
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() >= radius * radius {
            continue;
        }
        match field.jet(&x) {
            Ok(j) if j.gradient.norm() >= min_grad => out.push(x),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Quadratic, SphereCap};

    #[test]
    fn halton_first_points() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(halton(0, 3), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn directions_are_unit() {
        for n in 2..6 {
            for d in sphere_directions(n, 40) {
                let len: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((len - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rays_land_on_level_set() {
        let q = Quadratic::paraboloid(3);
        let pts = slice_points_on_rays(&q, 0.125, &RaySampler::new(vec![0.0; 3], 16, 2.0)).unwrap();
        assert_eq!(pts.len(), 16);
        for p in pts {
            let r: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((r - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rays_respect_domain() {
        let cap = SphereCap::hemisphere(2);
        let pts = slice_points_on_rays(&cap, 0.6, &RaySampler::new(vec![0.0, 0.0], 8, 1.5)).unwrap();
        assert_eq!(pts.len(), 8);
        for p in pts {
            assert!((cap.value(&p).unwrap() - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn random_fields_are_seeded() {
        let a = random_field(7, 3);
        let b = random_field(7, 3);
        let c = random_field(8, 3);
        let x = [0.1, 0.2, -0.3];
        assert_eq!(a.value(&x).unwrap(), b.value(&x).unwrap());
        assert_ne!(a.value(&x).unwrap(), c.value(&x).unwrap());
        let pts = random_regular_points(&a, 1, 20, 0.9, 1e-3).unwrap();
        assert_eq!(pts.len(), 20);
    }
}
