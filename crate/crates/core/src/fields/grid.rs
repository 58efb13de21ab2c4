//! Uniformly sampled height functions.
//!
//! File format (CSV, `.` decimal point):
//!
//! ```text
//! n,h,origin_1,...,origin_n,count_1,...,count_n
//! <n>,<h>,<o_1>,...,<o_n>,<N_1>,...,<N_n>
//! <samples, row-major: last axis fastest, N_n values per line>
//! ```
//!
//! Off-node queries use the tensor-product quadratic interpolant on the 3ⁿ
//! nodes around the nearest node, so value, gradient and Hessian exist
//! everywhere in the interior. At nodes the derivatives reduce to the usual
//! central differences.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{Domain, Jet, ScalarField};
use crate::error::{GeomError, Result};

pub const MIN_SAMPLES_PER_AXIS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spacing: f64,
    origin: Vec<f64>,
    counts: Vec<usize>,
    samples: Vec<f64>,
}

impl GridField {
    pub fn new(spacing: f64, origin: Vec<f64>, counts: Vec<usize>, samples: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GeomError::ParameterOutOfRange {
                name: "h",
                value: spacing,
                expected: "h > 0",
            });
        }
        if origin.is_empty() || origin.len() != counts.len() {
            return Err(GeomError::DimensionMismatch {
                expected: origin.len(),
                got: counts.len(),
            });
        }
        if let Some(&c) = counts.iter().find(|&&c| c < MIN_SAMPLES_PER_AXIS) {
            return Err(GeomError::ParameterOutOfRange {
                name: "samples per axis",
                value: c as f64,
                expected: "at least 5",
            });
        }
        let total: usize = counts.iter().product();
        if samples.len() != total {
            return Err(GeomError::DimensionMismatch {
                expected: total,
                got: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteInput("grid sample".into()));
        }
        Ok(Self { spacing, origin, counts, samples })
    }

    /// Samples `f` on the grid.
    pub fn sample(f: impl Fn(&[f64]) -> f64, spacing: f64, origin: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = origin.len();
        let total: usize = counts.iter().product();
        let mut samples = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        for _ in 0..total {
            for a in 0..n {
                x[a] = origin[a] + spacing * idx[a] as f64;
            }
            samples.push(f(&x));
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < counts[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self::new(spacing, origin, counts, samples)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (i, c)| acc * c + i)
    }

    pub fn node_value(&self, idx: &[usize]) -> f64 {
        self.samples[self.flat_index(idx)]
    }

    pub fn to_csv(&self) -> String {
        let n = self.origin.len();
        let mut s = String::new();
        let mut header = vec!["n".to_string(), "h".to_string()];
        header.extend((1..=n).map(|i| format!("origin_{i}")));
        header.extend((1..=n).map(|i| format!("count_{i}")));
        s.push_str(&header.join(","));
        s.push('\n');
        let mut meta = vec![n.to_string(), self.spacing.to_string()];
        meta.extend(self.origin.iter().map(|o| o.to_string()));
        meta.extend(self.counts.iter().map(|c| c.to_string()));
        s.push_str(&meta.join(","));
        s.push('\n');
        let row = self.counts[n - 1];
        for chunk in self.samples.chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: &str| GeomError::Parse(format!("grid file: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        if !header.trim_start().starts_with("n,h") {
            return Err(bad("header must start with n,h"));
        }
        let meta_line = lines.next().ok_or_else(|| bad("missing metadata line"))?;
        let meta: Vec<&str> = meta_line.split(',').map(str::trim).collect();
        let n: usize = meta.first().and_then(|v| v.parse().ok()).ok_or_else(|| bad("bad n"))?;
        if n == 0 || meta.len() != 2 + 2 * n {
            return Err(bad("metadata must hold n, h, n origins and n counts"));
        }
        let h: f64 = meta[1].parse().map_err(|_| bad("bad h"))?;
        let origin = meta[2..2 + n]
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| bad("bad origin")))
            .collect::<Result<Vec<_>>>()?;
        let counts = meta[2 + n..]
            .iter()
            .map(|v| v.parse::<usize>().map_err(|_| bad("bad count")))
            .collect::<Result<Vec<_>>>()?;
        let mut samples = Vec::new();
        for line in lines {
            for tok in line.split(',') {
                samples.push(tok.trim().parse::<f64>().map_err(|_| bad("bad sample"))?);
            }
        }
        Self::new(h, origin, counts, samples)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Nearest interior node and offsets `s ∈ [−½, ½]` in units of `h`.
    fn locate(&self, x: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let mut node = Vec::with_capacity(x.len());
        let mut off = Vec::with_capacity(x.len());
        for (a, xa) in x.iter().enumerate() {
            let t = (xa - self.origin[a]) / self.spacing;
            let c = (t.round() as isize).clamp(1, self.counts[a] as isize - 2) as usize;
            node.push(c);
            off.push(t - c as f64);
        }
        (node, off)
    }
}

/// Quadratic Lagrange basis on nodes −1, 0, 1 and its first two derivatives.
fn basis(s: f64) -> [[f64; 3]; 3] {
    [
        [0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)],
        [s - 0.5, -2.0 * s, s + 0.5],
        [1.0, -2.0, 1.0],
    ]
}

impl ScalarField for GridField {
    fn dim(&self) -> usize {
        self.origin.len()
    }
    fn domain(&self) -> Domain {
        Domain::Box {
            lo: self.origin.clone(),
            hi: self
                .origin
                .iter()
                .zip(&self.counts)
                .map(|(o, c)| o + self.spacing * (*c as f64 - 1.0))
                .collect(),
        }
    }
    fn margin(&self, _x: &[f64]) -> f64 {
        2.0 * self.spacing
    }
    fn is_analytic(&self) -> bool {
        false
    }
    fn value_at(&self, x: &[f64]) -> f64 {
        self.jet_at(x).value
    }
    fn jet_at(&self, x: &[f64]) -> Jet {
        let n = self.dim();
        let h = self.spacing;
        let (node, off) = self.locate(x);
        let bases: Vec<[[f64; 3]; 3]> = off.iter().map(|s| basis(*s)).collect();
        let mut value = 0.0;
        let mut grad = DVector::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        let mut stencil = vec![0usize; n];
        let mut idx = vec![0usize; n];
        for _ in 0..3usize.pow(n as u32) {
            for a in 0..n {
                idx[a] = node[a] + stencil[a] - 1;
            }
            let v = self.node_value(&idx);
            let w0: Vec<f64> = (0..n).map(|a| bases[a][0][stencil[a]]).collect();
            let prod_except = |skip: &[usize]| -> f64 {
                (0..n).filter(|a| !skip.contains(a)).map(|a| w0[a]).product()
            };
            value += v * prod_except(&[]);
            for a in 0..n {
                let d1a = bases[a][1][stencil[a]] / h;
                grad[a] += v * d1a * prod_except(&[a]);
                hess[(a, a)] += v * bases[a][2][stencil[a]] / (h * h) * prod_except(&[a]);
                for b in (a + 1)..n {
                    let d1b = bases[b][1][stencil[b]] / h;
                    let t = v * d1a * d1b * prod_except(&[a, b]);
                    hess[(a, b)] += t;
                    hess[(b, a)] += t;
                }
            }
            for a in (0..n).rev() {
                stencil[a] += 1;
                if stencil[a] < 3 {
                    break;
                }
                stencil[a] = 0;
            }
        }
        Jet { value, gradient: grad, hessian: hess }
    }
    fn label(&self) -> String {
        format!("grid(h={}, counts={:?})", self.spacing, self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quadratic_grid() -> GridField {
        GridField::sample(|x| 0.5 * x[0] * x[0] + x[0] * x[1] - 0.25 * x[1] * x[1] + 0.3, 0.1, vec![-1.0, -1.0], vec![21, 21])
            .unwrap()
    }

    #[test]
    fn reproduces_quadratics_exactly() {
        let g = quadratic_grid();
        let j = g.jet(&[0.23, -0.31]).unwrap();
        let (x, y) = (0.23, -0.31);
        assert_relative_eq!(j.value, 0.5 * x * x + x * y - 0.25 * y * y + 0.3, epsilon = 1e-12);
        assert_relative_eq!(j.gradient[0], x + y, epsilon = 1e-12);
        assert_relative_eq!(j.gradient[1], x - 0.5 * y, epsilon = 1e-12);
        assert_relative_eq!(j.hessian[(0, 0)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(j.hessian[(0, 1)], 1.0, epsilon = 1e-10);
        assert_relative_eq!(j.hessian[(1, 1)], -0.5, epsilon = 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let g = quadratic_grid();
        let text = g.to_csv();
        assert!(text.starts_with("n,h,origin_1,origin_2,count_1,count_2\n2,0.1,-1,-1,21,21\n"));
        let back = GridField::from_csv(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let g = quadratic_grid();
        g.write(&path).unwrap();
        assert_eq!(GridField::read(&path).unwrap(), g);
    }

    #[test]
    fn rejects_malformed() {
        assert!(GridField::from_csv("").is_err());
        assert!(GridField::from_csv("n,h\n2,0.1,0,0,5\n").is_err());
        assert!(GridField::from_csv("n,h,o1,o2,c1,c2\n2,0.1,0,0,5,5\n1,2,3\n").is_err());
        assert!(GridField::new(0.1, vec![0.0], vec![4], vec![0.0; 4]).is_err());
        assert!(GridField::new(-0.1, vec![0.0], vec![5], vec![0.0; 5]).is_err());
    }

    #[test]
    fn halo_is_excluded() {
        let g = quadratic_grid();
        assert!(g.jet(&[-0.85, 0.0]).is_err());
        assert!(g.jet(&[-0.79, 0.0]).is_ok());
    }
}
