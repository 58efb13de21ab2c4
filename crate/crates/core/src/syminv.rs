//! Elementary symmetric invariants of square matrices.
//!
//! For a real `n×n` matrix `A` (`n ≥ 2`) the trace `σ₁(A)`, the trace of the
//! lower-right `(n−1)×(n−1)` block `σ₁(A|1)`, and
//! `σ₂(A) = Σ_{i<j} (a_ii a_jj − a_ij a_ji)` satisfy the exact identity
//!
//! ```text
//! σ₁(A) σ₁(A|1) = σ₂(A) + n/(2(n−1)) σ₁(A|1)²
//!               + Σ_{i<j} a_ij a_ji
//!               + 1/(2(n−1)) Σ_{2≤i<j≤n} (a_ii − a_jj)²
//! ```
//!
//! so whenever every `a_ij a_ji ≥ 0` the left side dominates
//! `σ₂(A) + n/(2(n−1)) σ₁(A|1)²`, with equality exactly when the trailing
//! diagonal is constant and all the cross products vanish. For `n = 2` the
//! sum over `2 ≤ i < j ≤ n` is empty.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg::max_abs;

/// Default relative band for the equality flags of [`newton_gap`].
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-8;

/// A real square matrix with `n ≥ 2` and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(GeomError::InvalidDimension {
                got: m.nrows(),
                reason: "need n >= 2",
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFiniteInput("matrix entry".into()));
        }
        Ok(Self(m))
    }

    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(GeomError::DimensionMismatch {
                expected: n * n,
                got: rows.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    /// Entries i.i.d. uniform on `[−1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

pub fn sigma1(a: &SquareMatrix) -> f64 {
    a.as_matrix().trace()
}

/// Trace with the first row and column deleted.
pub fn sigma1_minor(a: &SquareMatrix) -> f64 {
    (1..a.dim()).map(|i| a.at(i, i)).sum()
}

pub fn sigma2(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a.at(i, i) * a.at(j, j) - a.at(i, j) * a.at(j, i);
        }
    }
    s
}

/// `Σ_{i<j} a_ij a_ji`.
pub fn cross_products(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a.at(i, j) * a.at(j, i);
        }
    }
    s
}

/// `Σ_{2≤i<j≤n} (a_ii − a_jj)²`; empty (zero) for `n = 2`.
pub fn minor_diagonal_dispersion(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 1..n {
        for j in (i + 1)..n {
            let d = a.at(i, i) - a.at(j, j);
            s += d * d;
        }
    }
    s
}

fn newton_weight(n: usize) -> f64 {
    n as f64 / (2.0 * (n as f64 - 1.0))
}

/// Left side minus right side of the exact identity; zero up to rounding.
pub fn identity_residual(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let m = sigma1_minor(a);
    let lhs = sigma1(a) * m;
    let rhs = sigma2(a)
        + newton_weight(n) * m * m
        + cross_products(a)
        + minor_diagonal_dispersion(a) / (2.0 * (n as f64 - 1.0));
    lhs - rhs
}

/// `σ₁(A)σ₁(A|1)`, the scale against which residuals are measured.
pub fn identity_lhs(a: &SquareMatrix) -> f64 {
    sigma1(a) * sigma1_minor(a)
}

/// The non-negative remainder `Σ a_ij a_ji + (1/(2(n−1))) Σ (a_ii − a_jj)²`.
/// Equals [`newton_gap`]'s gap by the identity; evaluated term by term.
pub fn sum_of_squares_remainder(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    cross_products(a) + minor_diagonal_dispersion(a) / (2.0 * (n as f64 - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonGap {
    pub gap: f64,
    pub minor_diagonal_equal: bool,
    pub cross_products_vanish: bool,
    pub equality: bool,
}

/// `σ₁(A)σ₁(A|1) − σ₂(A) − n/(2(n−1)) σ₁(A|1)²` together with the two
/// equality conditions, checked in a band `tol` relative to the max-norm.
pub fn newton_gap(a: &SquareMatrix, tol: f64) -> Result<NewtonGap> {
    let n = a.dim();
    let scale = max_abs(a.as_matrix());
    let product_band = tol * scale * scale;
    let diag_band = tol * scale;

    let mut cross_vanish = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = a.at(i, j) * a.at(j, i);
            if p < -product_band {
                return Err(GeomError::PreconditionViolated(format!(
                    "a[{i}][{j}] * a[{j}][{i}] = {p:e} < 0"
                )));
            }
            if p.abs() > product_band {
                cross_vanish = false;
            }
        }
    }
    let diag: Vec<f64> = (1..n).map(|i| a.at(i, i)).collect();
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let diag_equal = hi - lo <= diag_band;

    let m = sigma1_minor(a);
    let gap = sigma1(a) * m - sigma2(a) - newton_weight(n) * m * m;
    Ok(NewtonGap {
        gap,
        minor_diagonal_equal: diag_equal,
        cross_products_vanish: cross_vanish,
        equality: diag_equal && cross_vanish,
    })
}
