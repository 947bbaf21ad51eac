use nalgebra::{DMatrix, DVector};

use super::OrthonormalBasis;
use crate::error::{Error, Result};

const ZERO_NORM: f64 = 1e-300;

fn unit(x: &DVector<f64>) -> Result<DVector<f64>> {
    let norm = x.norm();
    if !(norm > ZERO_NORM) {
        return Err(Error::ZeroVector);
    }
    Ok(x / norm)
}

/// `sin∠(x, y)` for nonzero vectors, from the orthogonal residual
/// (accurate for small angles).
pub fn sin_angle_vectors(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let x = unit(x)?;
    let y = unit(y)?;
    let residual = &y - &x * x.dot(&y);
    Ok(residual.norm().clamp(0.0, 1.0))
}

/// `sin∠(x, K) = ‖(I − P_K)x‖` for unit `x`.
pub fn sin_angle_vector_subspace(x: &DVector<f64>, k: &OrthonormalBasis) -> Result<f64> {
    if x.len() != k.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: k.ambient_dim(), found: x.len() });
    }
    let x = unit(x)?;
    let q = k.columns();
    let residual = &x - q * (q.transpose() * &x);
    Ok(residual.norm().clamp(0.0, 1.0))
}

/// Sine of the minimal angle between two subspaces.
///
/// Equals `sqrt(1 − σ_max²)` with `σ_max` the largest singular value of the
/// cross-Gram `XᵀY`; evaluated as the smallest singular value of `(I − P_Y)X`
/// so that nearly intersecting subspaces keep full accuracy.
pub fn sin_angle_subspaces(x: &OrthonormalBasis, y: &OrthonormalBasis) -> Result<f64> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: x.ambient_dim(), found: y.ambient_dim() });
    }
    let (small, large) = if x.dim() <= y.dim() { (x, y) } else { (y, x) };
    let ys = large.columns();
    let residual: DMatrix<f64> = small.columns() - ys * (ys.transpose() * small.columns());
    let sv = residual.singular_values();
    let sin_min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let cos_max = cross_gram_cosine(small, large);
    // both routes agree to rounding; the residual route is the accurate one
    // near zero and the cosine route near one
    let sin = if sin_min < std::f64::consts::FRAC_1_SQRT_2 {
        sin_min
    } else {
        (1.0 - cos_max * cos_max).max(0.0).sqrt()
    };
    Ok(sin.clamp(0.0, 1.0))
}

fn cross_gram_cosine(x: &OrthonormalBasis, y: &OrthonormalBasis) -> f64 {
    let g = x.columns().transpose() * y.columns();
    g.singular_values().iter().copied().fold(0.0f64, f64::max).clamp(0.0, 1.0)
}
