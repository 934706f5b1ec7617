//! Extremal eigenvalues of the pencil `M v = lambda G v`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Largest accepted condition number of the unit-diagonal Gram matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneralizedEigs {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Condition number of `G` after rescaling to unit diagonal.
    pub condition: f64,
}

/// Whitening map `W` with `W^T G W = 1`, built from `G` rescaled to unit
/// diagonal. Returns `W` and the condition number.
pub fn whitening(g: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let size = g.nrows();
    if size == 0 || g.ncols() != size {
        return Err(domain(format!("Gram matrix must be square and nonempty, got {}x{}", g.nrows(), g.ncols())));
    }
    if g.diagonal().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::IllConditionedGram { condition: f64::INFINITY, limit: CONDITION_LIMIT });
    }
    let scale = DMatrix::from_diagonal(&g.diagonal().map(|v| 1.0 / v.sqrt()));
    let unit = &scale * g * &scale;
    let unit = (&unit + unit.transpose()) * 0.5;
    let eig = unit.symmetric_eigen();
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditionedGram { condition, limit: CONDITION_LIMIT });
    }
    let inv_sqrt = eig.eigenvalues.map(|v| 1.0 / v.sqrt());
    let q = &eig.eigenvectors;
    let root = q * DMatrix::from_diagonal(&inv_sqrt) * q.transpose();
    Ok((scale * root, condition))
}

/// Smallest and largest `lambda` with `M v = lambda G v`, for symmetric `M`
/// and positive definite `G`.
pub fn generalized_extremal_eigs(m: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<GeneralizedEigs> {
    if m.shape() != g.shape() {
        return Err(domain(format!("M is {:?} but G is {:?}", m.shape(), g.shape())));
    }
    let (w, condition) = whitening(g)?;
    Ok(extremal_with(&w, m, condition))
}

pub(crate) fn extremal_with(w: &DMatrix<f64>, m: &DMatrix<f64>, condition: f64) -> GeneralizedEigs {
    let a = w.transpose() * m * w;
    let a = (&a + a.transpose()) * 0.5;
    let e = a.symmetric_eigenvalues();
    GeneralizedEigs { lambda_min: e.min(), lambda_max: e.max(), condition }
}
