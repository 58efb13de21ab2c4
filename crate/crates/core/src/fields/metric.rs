//! Riemannian base metrics and their curvature in coordinates.
//!
//! Non-flat metrics are handled through their component functions
//! `x ↦ g_ij(x)`: first and second partials come from fourth-order central
//! stencils, and the Christoffel symbols, Ricci tensor and scalar curvature
//! follow from the coordinate formulas.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};

type ComponentFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type FactorFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Default base step for the component stencils; scaled by `max(1, |x|)`.
pub const DEFAULT_METRIC_STEP: f64 = 1e-3;

#[derive(Clone)]
pub enum BaseMetric {
    Flat { n: usize },
    /// `φ(x)⁻² δ_ij`.
    ConformallyFlat {
        n: usize,
        factor: Arc<FactorFn>,
        label: String,
        step: f64,
    },
    General {
        n: usize,
        components: Arc<ComponentFn>,
        label: String,
        step: f64,
    },
}

impl fmt::Debug for BaseMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseMetric::Flat { n } => write!(f, "Flat(n={n})"),
            BaseMetric::ConformallyFlat { n, label, step, .. } => {
                write!(f, "ConformallyFlat(n={n}, {label}, h={step})")
            }
            BaseMetric::General { n, label, step, .. } => write!(f, "General(n={n}, {label}, h={step})"),
        }
    }
}

/// Christoffel symbols `Γ^k_ij`, stored densely as `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub christoffel: Christoffel,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl BaseMetric {
    pub fn flat(n: usize) -> Self {
        BaseMetric::Flat { n }
    }

    /// The unit round sphere through stereographic coordinates:
    /// `φ⁻² δ` with `φ = (1 + |x|²)/2`.
    pub fn round_sphere(n: usize) -> Self {
        BaseMetric::ConformallyFlat {
            n,
            factor: Arc::new(|x: &[f64]| 0.5 * (1.0 + x.iter().map(|v| v * v).sum::<f64>())),
            label: "round-sphere".into(),
            step: DEFAULT_METRIC_STEP,
        }
    }

    pub fn conformally_flat(
        n: usize,
        label: impl Into<String>,
        factor: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BaseMetric::ConformallyFlat {
            n,
            factor: Arc::new(factor),
            label: label.into(),
            step: DEFAULT_METRIC_STEP,
        }
    }

    pub fn general(
        n: usize,
        label: impl Into<String>,
        components: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        BaseMetric::General {
            n,
            components: Arc::new(components),
            label: label.into(),
            step: DEFAULT_METRIC_STEP,
        }
    }

    /// Overrides the finite-difference step (ignored for flat metrics).
    pub fn with_step(mut self, h: f64) -> Self {
        match &mut self {
            BaseMetric::Flat { .. } => {}
            BaseMetric::ConformallyFlat { step, .. } | BaseMetric::General { step, .. } => *step = h,
        }
        self
    }

    pub fn dim(&self) -> usize {
        match self {
            BaseMetric::Flat { n } | BaseMetric::ConformallyFlat { n, .. } | BaseMetric::General { n, .. } => *n,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, BaseMetric::Flat { .. })
    }

    pub fn label(&self) -> String {
        format!("{self:?}")
    }

    pub fn components(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            BaseMetric::Flat { n } => DMatrix::identity(*n, *n),
            BaseMetric::ConformallyFlat { n, factor, .. } => {
                let phi = factor(x);
                DMatrix::identity(*n, *n) / (phi * phi)
            }
            BaseMetric::General { components, .. } => components(x),
        }
    }

    fn step_at(&self, x: &[f64]) -> f64 {
        let base = match self {
            BaseMetric::Flat { .. } => DEFAULT_METRIC_STEP,
            BaseMetric::ConformallyFlat { step, .. } | BaseMetric::General { step, .. } => *step,
        };
        base * super::norm(x).max(1.0)
    }

    pub fn jet(&self, x: &[f64]) -> Result<MetricJet> {
        let n = self.dim();
        if x.len() != n {
            return Err(GeomError::DimensionMismatch { expected: n, got: x.len() });
        }
        if let BaseMetric::ConformallyFlat { factor, .. } = self {
            let phi = factor(x);
            if !(phi > 0.0) {
                return Err(GeomError::NonPositiveFactor(phi));
            }
        }
        if self.is_flat() {
            return Ok(MetricJet {
                g: DMatrix::identity(n, n),
                g_inv: DMatrix::identity(n, n),
                christoffel: Christoffel::zeros(n),
                ricci: DMatrix::zeros(n, n),
                scalar: 0.0,
            });
        }
        let h = self.step_at(x);
        let (g, dg, ddg) = fd_matrix_derivatives(|y| self.components(y), x, h);
        curvature_from_derivatives(&g, &dg, &ddg, x)
    }
}

/// Value, first partials `dg[m] = ∂_m g` and second partials
/// `ddg[m][l] = ∂_m ∂_l g` of a matrix-valued function, by fourth-order central
/// stencils with step `h`.
pub fn fd_matrix_derivatives(
    f: impl Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    h: f64,
) -> (DMatrix<f64>, Vec<DMatrix<f64>>, Vec<Vec<DMatrix<f64>>>) {
    let n = x.len();
    let at = |shift: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for (i, s) in shift {
            y[*i] += s * h;
        }
        f(&y)
    };
    let g0 = f(x);
    let mut dg = Vec::with_capacity(n);
    let mut ddg = vec![vec![DMatrix::zeros(g0.nrows(), g0.ncols()); n]; n];
    for m in 0..n {
        let p1 = at(&[(m, 1.0)]);
        let m1 = at(&[(m, -1.0)]);
        let p2 = at(&[(m, 2.0)]);
        let m2 = at(&[(m, -2.0)]);
        dg.push((&m2 - &p2 + (&p1 - &m1) * 8.0) / (12.0 * h));
        ddg[m][m] = ((&p1 + &m1) * 16.0 - &p2 - &m2 - &g0 * 30.0) / (12.0 * h * h);
    }
    let weights = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    for m in 0..n {
        for l in (m + 1)..n {
            let mut acc = DMatrix::zeros(g0.nrows(), g0.ncols());
            for (sm, wm) in weights {
                for (sl, wl) in weights {
                    acc += at(&[(m, sm), (l, sl)]) * (wm * wl);
                }
            }
            let v = acc / (144.0 * h * h);
            ddg[l][m] = v.clone();
            ddg[m][l] = v;
        }
    }
    (g0, dg, ddg)
}

/// Christoffel symbols, Ricci tensor and scalar curvature from a metric and
/// its first two coordinate derivatives.
pub fn curvature_from_derivatives(
    g: &DMatrix<f64>,
    dg: &[DMatrix<f64>],
    ddg: &[Vec<DMatrix<f64>>],
    x: &[f64],
) -> Result<MetricJet> {
    let n = g.nrows();
    if g.clone().cholesky().is_none() {
        return Err(GeomError::NotPositiveDefinite { point: x.to_vec() });
    }
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::NotPositiveDefinite { point: x.to_vec() })?;
    let dg_inv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&g_inv * d * &g_inv)).collect();

    // First-kind combination ∂_i g_jl + ∂_j g_il − ∂_l g_ij.
    let first = |i: usize, j: usize, l: usize| dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)];
    let first_d = |m: usize, i: usize, j: usize, l: usize| ddg[m][i][(j, l)] + ddg[m][j][(i, l)] - ddg[m][l][(i, j)];

    let mut gamma = Christoffel::zeros(n);
    // dgamma[m] holds ∂_m Γ.
    let mut dgamma: Vec<Christoffel> = (0..n).map(|_| Christoffel::zeros(n)).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[(k, l)] * first(i, j, l);
                }
                gamma.set(k, i, j, 0.5 * s);
                for (m, dgm) in dgamma.iter_mut().enumerate() {
                    let mut t = 0.0;
                    for l in 0..n {
                        t += dg_inv[m][(k, l)] * first(i, j, l) + g_inv[(k, l)] * first_d(m, i, j, l);
                    }
                    dgm.set(k, i, j, 0.5 * t);
                }
            }
        }
    }

    let mut ricci = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut r = 0.0;
            for k in 0..n {
                r += dgamma[k].get(k, i, j) - dgamma[j].get(k, i, k);
                for l in 0..n {
                    r += gamma.get(k, k, l) * gamma.get(l, i, j) - gamma.get(k, j, l) * gamma.get(l, i, k);
                }
            }
            ricci[(i, j)] = r;
        }
    }
    let scalar = (&g_inv * &ricci).trace();
    Ok(MetricJet { g: g.clone(), g_inv, christoffel: gamma, ricci, scalar })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form scalar curvature of `φ⁻² δ`: `2(n−1) φ Δφ − n(n−1)|∇φ|²`.
    fn conformal_scalar(n: usize, phi: f64, grad2: f64, lap: f64) -> f64 {
        let nf = n as f64;
        2.0 * (nf - 1.0) * phi * lap - nf * (nf - 1.0) * grad2
    }

    #[test]
    fn flat_is_flat() {
        let j = BaseMetric::flat(3).jet(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(j.scalar, 0.0);
        assert_eq!(j.christoffel.max_abs(), 0.0);
        assert_eq!(j.ricci, DMatrix::zeros(3, 3));
    }

    #[test]
    fn round_sphere_scalar_curvature() {
        let j2 = BaseMetric::round_sphere(2).jet(&[0.3, -0.1]).unwrap();
        assert!((j2.scalar - 2.0).abs() < 1e-6, "R = {}", j2.scalar);
        let j3 = BaseMetric::round_sphere(3).jet(&[0.3, -0.1, 0.2]).unwrap();
        assert!((j3.scalar - 6.0).abs() < 1e-6, "R = {}", j3.scalar);
        // Einstein: Ric = (n−1) g.
        assert!((&j3.ricci - &j3.g * 2.0).amax() < 1e-6);
    }

    #[test]
    fn ricci_symmetric_and_traces_to_scalar() {
        let m = BaseMetric::general(3, "warped", |x: &[f64]| {
            DMatrix::from_row_slice(
                3,
                3,
                &[
                    1.0 + x[1] * x[1],
                    0.1 * x[0],
                    0.0,
                    0.1 * x[0],
                    1.5 + 0.2 * x[2].sin(),
                    0.05 * x[1],
                    0.0,
                    0.05 * x[1],
                    2.0 + x[0] * x[2],
                ],
            )
        });
        let j = m.jet(&[0.2, 0.4, -0.3]).unwrap();
        assert!((&j.ricci - j.ricci.transpose()).amax() < 1e-7);
        let mut tr = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                tr += j.g_inv[(a, b)] * j.ricci[(a, b)];
            }
        }
        assert!((tr - j.scalar).abs() < 1e-12);
    }

    #[test]
    fn conformal_closed_form_agrees() {
        // φ = 1 + 0.3 x₀² + 0.2 x₀x₁ + 0.1 sin(x₁)
        let n = 2;
        let m = BaseMetric::conformally_flat(n, "test", |x: &[f64]| 1.0 + 0.3 * x[0] * x[0] + 0.2 * x[0] * x[1] + 0.1 * x[1].sin())
            .with_step(1e-3);
        let x: [f64; 2] = [0.4, -0.3];
        let phi = 1.0 + 0.3 * x[0] * x[0] + 0.2 * x[0] * x[1] + 0.1 * x[1].sin();
        let gx = 0.6 * x[0] + 0.2 * x[1];
        let gy = 0.2 * x[0] + 0.1 * x[1].cos();
        let lap = 0.6 - 0.1 * x[1].sin();
        let exact = conformal_scalar(n, phi, gx * gx + gy * gy, lap);
        let j = m.jet(&x).unwrap();
        assert!((j.scalar - exact).abs() < 1e-6, "{} vs {}", j.scalar, exact);
    }

    #[test]
    fn indefinite_metric_rejected() {
        let m = BaseMetric::general(2, "bad", |_x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(matches!(m.jet(&[0.0, 0.0]), Err(GeomError::NotPositiveDefinite { .. })));
    }
}
