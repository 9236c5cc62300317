//! Small dense helpers shared by the Gaussian-state code.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Covariances with a larger spectral condition number are rejected.
pub(crate) const MAX_CONDITION: f64 = 1e12;

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let asym = max_abs(&(m - m.transpose()));
    if asym > rel_tol * scale {
        return Err(Error::InvalidState(format!(
            "covariance not symmetric (max asymmetry {asym:.3e})"
        )));
    }
    Ok(())
}

/// Spectral condition number of a symmetric matrix; infinite when it is not
/// positive definite.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x.abs())));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solves `m x = b` for a symmetric positive-definite `m`, rejecting
/// matrices that are singular or too badly conditioned to trust.
pub(crate) fn spd_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let chol = checked_cholesky(m)?;
    Ok(chol.solve(b))
}

pub(crate) fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(checked_cholesky(m)?.inverse())
}

fn checked_cholesky(m: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let condition = condition_number(m);
    if !condition.is_finite() {
        return Err(Error::Singular(
            "covariance is not positive definite".to_string(),
        ));
    }
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned {
            condition,
            limit: MAX_CONDITION,
        });
    }
    m.clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("Cholesky factorisation failed".to_string()))
}
