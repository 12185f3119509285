//! Small dense symmetric solves with the toolkit-wide ridge policy.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Condition number above which a symmetric matrix is regularized.
pub const MAX_CONDITION: f64 = 1e12;
/// Ridge scale relative to the mean diagonal entry.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Ratio of the largest absolute eigenvalue to the smallest eigenvalue of a
/// symmetric matrix; infinite when the smallest eigenvalue is not positive.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// A symmetric matrix factored after the ridge policy was applied.
#[derive(Clone, Debug)]
pub struct RegularizedSpd {
    pub chol: Cholesky<f64, Dyn>,
    pub ridge: f64,
}

impl RegularizedSpd {
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(rhs)
    }
}

/// Ridge value the policy assigns to `m` (0 when it is well conditioned).
pub fn ridge_for(m: &DMatrix<f64>) -> Option<f64> {
    let cond = condition_number(m);
    if cond <= MAX_CONDITION {
        return Some(0.0);
    }
    let dim = m.nrows() as f64;
    let ridge = RIDGE_SCALE * m.trace() / dim;
    (ridge > 0.0 && ridge.is_finite()).then_some(ridge)
}

/// Factors a symmetric matrix, adding `1e-8 · trace / dim` to the diagonal
/// when its condition number exceeds 1e12. `None` if it stays singular.
pub fn factor_spd(m: &DMatrix<f64>) -> Option<RegularizedSpd> {
    let ridge = ridge_for(m)?;
    let mut a = m.clone();
    if ridge > 0.0 {
        for i in 0..a.nrows() {
            a[(i, i)] += ridge;
        }
    }
    Cholesky::new(a).map(|chol| RegularizedSpd { chol, ridge })
}

/// Solves the normal equations (XᵀX) b = Xᵀy under the ridge policy.
pub fn solve_normal_equations(xtx: &DMatrix<f64>, xty: &DVector<f64>) -> Result<Vec<f64>> {
    let f = factor_spd(xtx).ok_or(Error::SingularDesign)?;
    Ok(f.solve(xty).iter().copied().collect())
}

/// Least-squares coefficients of `y` on the columns of `x`.
pub fn ols_fit(x: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if n < p {
        return Err(Error::InsufficientData { needed: p, got: n });
    }
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * x;
    let xty = x.transpose() * yv;
    solve_normal_equations(&xtx, &xty)
}
