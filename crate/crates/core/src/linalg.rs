//! Small dense helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Eigenvalues of a symmetric matrix, ascending. The input is symmetrized first.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of an operator `a` that is self-adjoint with respect to the
/// positive definite `metric`. With `metric = L Lᵀ`, `Lᵀ a L⁻ᵀ` is symmetric
/// and similar to `a`.
pub fn self_adjoint_eigenvalues(
    a: &DMatrix<f64>,
    metric: &DMatrix<f64>,
    point: &[f64],
) -> Result<Vec<f64>> {
    let chol = metric
        .clone()
        .cholesky()
        .ok_or_else(|| GeomError::NotPositiveDefinite {
            point: point.to_vec(),
        })?;
    let l = chol.l();
    let lt = l.transpose();
    let lt_inv = lt
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::NotPositiveDefinite {
            point: point.to_vec(),
        })?;
    let s = &lt * a * lt_inv;
    Ok(symmetric_eigenvalues(&s))
}

/// The matrix with the first row and column removed.
pub fn drop_first(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    m.view((1, 1), (n - 1, n - 1)).into_owned()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Quadratic form `uᵀ m v`.
pub fn bilinear(m: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * m * v)[(0, 0)]
}

pub fn is_finite_matrix(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub fn is_finite_vector(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Spread (max − min) of a sorted slice; zero for fewer than two entries.
pub fn spread(sorted: &[f64]) -> f64 {
    match (sorted.first(), sorted.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn self_adjoint_eigs_match_generalized_problem() {
        // a = G⁻¹ h with h symmetric: eigenvalues solve h v = λ G v.
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let a = g.clone().try_inverse().unwrap() * &h;
        let ev = self_adjoint_eigenvalues(&a, &g, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(ev[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(ev[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_indefinite_metric() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let a = DMatrix::identity(2, 2);
        assert!(self_adjoint_eigenvalues(&a, &g, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn drop_first_keeps_lower_block() {
        let m = DMatrix::from_row_slice(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]);
        let d = drop_first(&m);
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[5., 6., 8., 9.]));
    }
}
