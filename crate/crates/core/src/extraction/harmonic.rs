use nalgebra::{DMatrix, DVector};

use super::{assemble, Method, RawPair, RitzSet};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, householder_qr, jacobi_eigh, shift_invert_apply, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};
use crate::tol::TOL_SHIFT;

/// Harmonic Rayleigh–Ritz through the shift-invert form.
///
/// With `S = A − σI` and `S·K = Q·R`, the harmonic pencil
/// `Kᵀ S² K c = ξ Kᵀ S K c` becomes the symmetric problem
/// `Qᵀ S⁻¹ Q y = τ y` with `c = R⁻¹ y` and `θ = σ + 1/τ`.
/// Reduced values with `|τ| < TOL_SHIFT·‖S⁻¹‖` are reported as `INF`.
pub fn harmonic_via_shift_invert(a: &SpectralMatrix, k: &OrthonormalBasis, sigma: f64) -> Result<RitzSet> {
    check_dims(a, k)?;
    a.check_shift(sigma)?;
    let sk = a.matrix().shifted(sigma).matrix() * k.columns();
    let (q, r) = householder_qr(&sk)?;
    let siq = shift_invert_apply(a, sigma, &q)?;
    let reduced = SymmetricMatrix::symmetrize(q.transpose() * siq);
    let eig = jacobi_eigh(&reduced)?;
    let neutral = TOL_SHIFT / a.shift_gap(sigma);
    let pairs = eig
        .values()
        .iter()
        .enumerate()
        .map(|(j, &tau)| {
            let coefficient = solve_upper(&r, &eig.vector(j));
            RawPair { value: harmonic_value(sigma, tau, neutral), tau: Some(tau), coefficient }
        })
        .collect();
    Ok(assemble(Method::Harmonic, Some(sigma), k, pairs))
}

/// Harmonic Rayleigh–Ritz through the pencil itself.
///
/// `M₁ = Kᵀ S² K = L·Lᵀ` (Cholesky) and `M₂ = Kᵀ S K`; the eigenvalues of
/// `L⁻¹ M₂ L⁻ᵀ` are `1/ξ`, eigenvectors map back as `c = L⁻ᵀ y`.
/// Retained as an independent cross-check of [`harmonic_via_shift_invert`].
pub fn harmonic_rayleigh_ritz(a: &SpectralMatrix, k: &OrthonormalBasis, sigma: f64) -> Result<RitzSet> {
    check_dims(a, k)?;
    a.check_shift(sigma)?;
    let sk = a.matrix().shifted(sigma).matrix() * k.columns();
    let m1 = sk.transpose() * &sk;
    let m2 = SymmetricMatrix::symmetrize(k.columns().transpose() * &sk).into_matrix();
    let l = cholesky(&m1)?;
    let y = l.solve_lower_triangular(&m2).ok_or(Error::CholeskyFailure { pivot: 0 })?;
    let g = l.solve_lower_triangular(&y.transpose()).ok_or(Error::CholeskyFailure { pivot: 0 })?;
    let eig = jacobi_eigh(&SymmetricMatrix::symmetrize(g))?;
    let lt = l.transpose();
    let neutral = TOL_SHIFT / a.shift_gap(sigma);
    let pairs = eig
        .values()
        .iter()
        .enumerate()
        .map(|(j, &inv_xi)| {
            let coefficient = solve_upper(&lt, &eig.vector(j));
            RawPair { value: harmonic_value(sigma, inv_xi, neutral), tau: Some(inv_xi), coefficient }
        })
        .collect();
    Ok(assemble(Method::Harmonic, Some(sigma), k, pairs))
}

pub(crate) fn harmonic_value(sigma: f64, tau: f64, neutral: f64) -> f64 {
    if tau.abs() < neutral {
        f64::INFINITY
    } else {
        sigma + 1.0 / tau
    }
}

pub(crate) fn solve_upper(r: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    // R has a positive diagonal bounded below by the QR rank check
    r.solve_upper_triangular(y).unwrap_or_else(|| y.clone())
}

pub(crate) fn check_dims(a: &SpectralMatrix, k: &OrthonormalBasis) -> Result<()> {
    if k.ambient_dim() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: k.ambient_dim() });
    }
    Ok(())
}
