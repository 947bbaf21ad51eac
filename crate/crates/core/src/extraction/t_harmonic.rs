use nalgebra::{DMatrix, DVector};

use super::harmonic::{check_dims, harmonic_value, solve_upper};
use super::{assemble, Method, RawPair, RitzSet};
use crate::error::{Error, Result};
use crate::linalg::{householder_qr, jacobi_eigh, shift_invert_apply, spd_sqrt, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};
use crate::tol::{TOL_COMMUTE, TOL_SHIFT};

/// T-harmonic Rayleigh–Ritz for an SPD preconditioner `T`:
/// `Av − θv ⊥_T (A − σI)K`, i.e. `Kᵀ S T S K c = ξ Kᵀ S T K c`.
pub fn t_harmonic_rayleigh_ritz(a: &SpectralMatrix, k: &OrthonormalBasis, sigma: f64, t: &SymmetricMatrix) -> Result<RitzSet> {
    let t_sqrt = spd_sqrt(t)?;
    t_harmonic_with_sqrt(a, k, sigma, t, &t_sqrt)
}

/// Same as [`t_harmonic_rayleigh_ritz`] with a precomputed `T^{1/2}`.
///
/// Let `T^{1/2} S K = Q·R`. When `T` commutes with `A` the pencil is the
/// symmetric problem `Qᵀ S⁻¹ Q y = τ y`. Otherwise `Kᵀ S T K` is not
/// symmetric and the reduced matrix `R⁻ᵀ (Kᵀ S T K) R⁻¹` is solved as a
/// general eigenproblem; complex reduced values are an error.
pub fn t_harmonic_with_sqrt(
    a: &SpectralMatrix,
    k: &OrthonormalBasis,
    sigma: f64,
    t: &SymmetricMatrix,
    t_sqrt: &SymmetricMatrix,
) -> Result<RitzSet> {
    check_dims(a, k)?;
    if t.order() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: t.order() });
    }
    a.check_shift(sigma)?;
    let s = a.matrix().shifted(sigma);
    let sk = s.matrix() * k.columns();
    let (q, r) = householder_qr(&(t_sqrt.matrix() * &sk))?;
    let neutral = TOL_SHIFT / a.shift_gap(sigma);

    let reduced: Vec<(f64, DVector<f64>)> = if commutation_residual(a.matrix(), t) <= TOL_COMMUTE {
        let siq = shift_invert_apply(a, sigma, &q)?;
        let eig = jacobi_eigh(&SymmetricMatrix::symmetrize(q.transpose() * siq))?;
        eig.values().iter().enumerate().map(|(j, &tau)| (tau, eig.vector(j))).collect()
    } else {
        let m2 = sk.transpose() * t.matrix() * k.columns();
        let rinv = r.clone().try_inverse().ok_or(Error::RankDeficient { column: 0, pivot: 0.0 })?;
        let g = rinv.transpose() * m2 * &rinv;
        general_real_eigenpairs(&g)?
    };

    let pairs = reduced
        .into_iter()
        .map(|(tau, y)| RawPair { value: harmonic_value(sigma, tau, neutral), tau: Some(tau), coefficient: solve_upper(&r, &y) })
        .collect();
    Ok(assemble(Method::THarmonic, Some(sigma), k, pairs))
}

/// `‖TA − AT‖_F / (‖A‖_F·‖T‖_F)`.
pub fn commutation_residual(a: &SymmetricMatrix, t: &SymmetricMatrix) -> f64 {
    let ta = t.matrix() * a.matrix();
    let scale = a.frobenius_norm() * t.frobenius_norm();
    if scale == 0.0 {
        return 0.0;
    }
    (&ta - ta.transpose()).norm() / scale
}

fn general_real_eigenpairs(g: &DMatrix<f64>) -> Result<Vec<(f64, DVector<f64>)>> {
    let s = g.nrows();
    let scale = g.norm().max(f64::MIN_POSITIVE);
    let eigenvalues = g.clone().complex_eigenvalues();
    let mut out = Vec::with_capacity(s);
    for ev in eigenvalues.iter() {
        if ev.im.abs() > 1e-10 * scale {
            return Err(Error::ComplexHarmonicValues { imag: ev.im });
        }
        let tau = ev.re;
        let shifted = g - DMatrix::identity(s, s) * tau;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors requested");
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
        let y = vt.row(idx).transpose().into_owned();
        out.push((tau, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::harmonic_via_shift_invert;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_preconditioner_matches_harmonic() {
        let a = SpectralMatrix::new(
            SymmetricMatrix::new(DMatrix::from_fn(5, 5, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + (i == j) as u8 as f64 * i as f64))
                .unwrap(),
        )
        .unwrap();
        let k = crate::linalg::qr_orthonormalize(&DMatrix::from_fn(5, 2, |i, j| ((i + 2 * j) % 3) as f64 + 0.1 * i as f64)).unwrap();
        let h = harmonic_via_shift_invert(&a, &k, 1.7).unwrap();
        let t = t_harmonic_rayleigh_ritz(&a, &k, 1.7, &SymmetricMatrix::identity(5)).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(h.values[j], t.values[j], epsilon = 1e-12);
        }
        assert_abs_diff_eq!((&h.vectors - &t.vectors).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn commuting_absolute_inverse_is_exact_on_invariant_subspace() {
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 2.0, 4.0]).unwrap()).unwrap();
        let t = SymmetricMatrix::from_diagonal(&[1.0 / 1.5, 2.0, 1.0 / 1.5]).unwrap();
        let k = OrthonormalBasis::coordinate(3, &[0, 2]).unwrap();
        let r = t_harmonic_rayleigh_ritz(&a, &k, 2.5, &t).unwrap();
        assert_abs_diff_eq!(r.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.values[1], 4.0, epsilon = 1e-14);
    }

    #[test]
    fn indefinite_preconditioner_rejected() {
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        let k = OrthonormalBasis::coordinate(2, &[0]).unwrap();
        let t = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(t_harmonic_rayleigh_ritz(&a, &k, 1.5, &t), Err(Error::NotPositiveDefinite { .. })));
    }
}
