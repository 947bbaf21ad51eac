use nalgebra::DMatrix;

use super::standard::{complement_distance, span_of};
use super::{coupling_norm, harmonic_delta, BoundId, BoundReport};
use crate::error::{Error, Result};
use crate::extraction::{
    commutation_residual, harmonic_via_shift_invert, pair_to_eigenvector, pair_with_vector, select_theta_k, t_harmonic_with_sqrt, RitzSet,
};
use crate::linalg::{
    frobenius_norm, householder_qr, jacobi_eigh, shift_invert_apply, sin_angle_subspaces, sin_angle_vector_subspace, sin_angle_vectors,
    OrthonormalBasis, SpectralMatrix, SymmetricMatrix,
};
use crate::precond::PreconditionerSpec;
use crate::tol::{TOL_COMMUTE, TOL_CONTAIN, TOL_SHIFT};

/// `γ` for harmonic extraction: `‖P_Q (A − σI)⁻¹ (I − P_Q)‖` with `Q = orth(GK)`.
fn harmonic_gamma(a: &SpectralMatrix, sigma: f64, gk: &DMatrix<f64>, frobenius: bool) -> Result<f64> {
    let (q, _) = householder_qr(gk)?;
    let siq = shift_invert_apply(a, sigma, &q)?;
    Ok(coupling_norm(&q, &siq, frobenius))
}

fn separation(set: &RitzSet, skip: &[usize], lambda: f64, sigma: f64) -> f64 {
    let rest = set.values.iter().enumerate().filter(|(j, _)| !skip.contains(j)).map(|(_, &v)| v);
    harmonic_delta(rest, lambda, sigma)
}

/// Sine bound for a harmonic Ritz vector:
/// `sin∠(x, v) ≤ κ(A − σI)·sqrt(1 + γ²/δ²)·sin∠(x, K)` with
/// `γ = ‖P_Q (A − σI)⁻¹ (I − P_Q)‖`, `Q = (A − σI)K`.
pub fn harmonic_bound(a: &SpectralMatrix, k: &OrthonormalBasis, sigma: f64, target_index: usize) -> Result<BoundReport> {
    let set = harmonic_via_shift_invert(a, k, sigma)?;
    let pair = pair_to_eigenvector(&set, a, target_index)?;
    let x = a.eigenvector(target_index);
    let sk = a.matrix().shifted(sigma).matrix() * k.columns();
    let gamma = harmonic_gamma(a, sigma, &sk, false)?;
    let delta = separation(&set, &[pair.index], pair.target_lambda, sigma);
    let lhs = sin_angle_vectors(&x, &set.vector(pair.index))?;
    let sin_k = sin_angle_vector_subspace(&x, k)?;
    Ok(BoundReport::new(BoundId::Harmonic, lhs, gamma, delta, Some(a.shift_condition_number(sigma)), sin_k))
}

/// Harmonic bound with `K` inside an invariant subspace `range(X)`: the
/// condition number is taken over `Λ(XᵀAX)` only.
///
/// The extraction is carried out on the reduced matrix `XᵀAX` in the
/// coordinates `XᵀK`; since `(A − σI)K ⊆ range(X)` this yields the same
/// harmonic pairs as extracting from `K` in the full space.
pub fn deflated_harmonic_bound(
    a: &SpectralMatrix,
    x_basis: &OrthonormalBasis,
    k: &OrthonormalBasis,
    sigma: f64,
    target_index: usize,
) -> Result<BoundReport> {
    let n = a.order();
    for dim in [x_basis.ambient_dim(), k.ambient_dim()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, found: dim });
        }
    }
    if target_index >= n {
        return Err(Error::DimensionError(format!("target index {target_index} out of range for order {n}")));
    }
    let xm = x_basis.columns();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let ax = a.matrix().matrix() * xm;
    let b = xm.transpose() * &ax;
    let residual = frobenius_norm(&(&ax - xm * &b)) / scale;
    if residual > TOL_CONTAIN {
        return Err(Error::NotInvariant { residual });
    }
    let kx = xm.transpose() * k.columns();
    let residual = frobenius_norm(&(k.columns() - xm * &kx));
    if residual > TOL_CONTAIN {
        return Err(Error::SubspaceNotContained { residual });
    }
    let x = a.eigenvector(target_index);
    let residual = sin_angle_vector_subspace(&x, x_basis)?;
    if residual > TOL_CONTAIN {
        return Err(Error::SubspaceNotContained { residual });
    }

    let reduced = SpectralMatrix::new(SymmetricMatrix::symmetrize(b))?;
    reduced.check_shift(sigma)?;
    let (kq, _) = householder_qr(&kx)?;
    let k_red = OrthonormalBasis::from_trusted(kq);
    let x_red = xm.transpose() * &x;
    let lambda = a.eigenvalues()[target_index];

    let set = harmonic_via_shift_invert(&reduced, &k_red, sigma)?;
    let index = pair_with_vector(&set, &x_red, lambda)?;
    let sk = reduced.matrix().shifted(sigma).matrix() * k_red.columns();
    let gamma = harmonic_gamma(&reduced, sigma, &sk, false)?;
    let delta = separation(&set, &[index], lambda, sigma);
    let lhs = sin_angle_vectors(&x, &(xm * set.vector(index)))?;
    let sin_k = sin_angle_vector_subspace(&x, k)?;
    let kappa = reduced.shift_condition_number(sigma);
    Ok(BoundReport::new(BoundId::Deflated, lhs, gamma, delta, Some(kappa), sin_k))
}

/// Subspace version for the eigenspace `X` of `target_lambda`:
/// `sin∠(X, V) ≤ κ(A − σI)·sqrt(1 + γ_F²/δ²)·sin∠(X, K)` where `V` spans the
/// `k` harmonic Ritz vectors with values closest to `λ` (default `k = dim X`).
pub fn eigenspace_harmonic_bound(
    a: &SpectralMatrix,
    k: &OrthonormalBasis,
    sigma: f64,
    target_lambda: f64,
    k_sel: Option<usize>,
) -> Result<BoundReport> {
    let (_, x) = a.eigenspace(target_lambda)?;
    let set = harmonic_via_shift_invert(a, k, sigma)?;
    let chosen = select_theta_k(&set.values, target_lambda, k_sel.unwrap_or(x.dim()))?;
    let sk = a.matrix().shifted(sigma).matrix() * k.columns();
    let gamma = harmonic_gamma(a, sigma, &sk, true)?;
    let delta = complement_distance(&set.values, &chosen, |theta| harmonic_delta([theta], target_lambda, sigma));
    let v = span_of(&set, &chosen)?;
    let lhs = sin_angle_subspaces(&x, &v)?;
    let sin_k = sin_angle_subspaces(&x, k)?;
    Ok(BoundReport::new(BoundId::Eigenspace, lhs, gamma, delta, Some(a.shift_condition_number(sigma)), sin_k))
}

/// T-harmonic bound for an SPD `T` commuting with `A`:
/// `sin∠(x, v) ≤ κ(T^{1/2}(A − σI))·sqrt(1 + γ²/δ²)·sin∠(x, K)` with
/// `Q = T^{1/2}(A − σI)K`.
///
/// A non-commuting `T` is rejected unless `force` is set; the report is then
/// computed from the same formulas but carries no guarantee.
pub fn t_harmonic_bound(
    a: &SpectralMatrix,
    k: &OrthonormalBasis,
    sigma: f64,
    t: &PreconditionerSpec,
    target_index: usize,
    force: bool,
) -> Result<BoundReport> {
    if t.realized().order() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: t.realized().order() });
    }
    let residual = commutation_residual(a.matrix(), t.realized());
    if residual > TOL_COMMUTE && !force {
        return Err(Error::NotCommuting { residual });
    }
    let set = t_harmonic_with_sqrt(a, k, sigma, t.realized(), t.sqrt())?;
    let pair = pair_to_eigenvector(&set, a, target_index)?;
    let x = a.eigenvector(target_index);
    let gk = t.sqrt().matrix() * (a.matrix().shifted(sigma).matrix() * k.columns());
    let gamma = harmonic_gamma(a, sigma, &gk, false)?;
    let delta = separation(&set, &[pair.index], pair.target_lambda, sigma);
    let lhs = sin_angle_vectors(&x, &set.vector(pair.index))?;
    let sin_k = sin_angle_vector_subspace(&x, k)?;
    let kappa = t.kappa_with_shift(a, sigma)?;
    Ok(BoundReport::new(BoundId::THarmonic, lhs, gamma, delta, Some(kappa), sin_k))
}

/// `‖B⁻¹‖` for `B = Kᵀ(A − σI)K`.
pub fn b_inverse_norm(a: &SpectralMatrix, k: &OrthonormalBasis, sigma: f64) -> Result<f64> {
    if k.ambient_dim() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: k.ambient_dim() });
    }
    let kc = k.columns();
    let b = SymmetricMatrix::symmetrize(kc.transpose() * a.matrix().shifted(sigma).matrix() * kc);
    let eig = jacobi_eigh(&b)?;
    let min_abs = eig.values().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let scale = a.eigenvalues().iter().map(|l| (l - sigma).abs()).fold(0.0f64, f64::max);
    if !(min_abs > TOL_SHIFT * scale) {
        return Err(Error::SingularB { min_abs });
    }
    Ok(1.0 / min_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundId;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> SpectralMatrix {
        SpectralMatrix::new(SymmetricMatrix::from_diagonal(v).unwrap()).unwrap()
    }

    fn tilted(n: usize, cols: &[(usize, usize, f64)]) -> OrthonormalBasis {
        let mut m = DMatrix::zeros(n, cols.len());
        for (j, &(p, q, phi)) in cols.iter().enumerate() {
            m[(p, j)] = phi.cos();
            m[(q, j)] = phi.sin();
        }
        crate::linalg::qr_orthonormalize(&m).unwrap()
    }

    #[test]
    fn invariant_subspace_gives_zero_everywhere() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let k = OrthonormalBasis::coordinate(3, &[0, 2]).unwrap();
        let r = harmonic_bound(&a, &k, 2.5, 2).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.gamma < 1e-15);
        assert_eq!(r.rhs, 0.0);
        assert_eq!(r.kappa, Some(3.0));
        assert!(r.satisfied);
    }

    #[test]
    fn kappa_and_delta_examples() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let k = OrthonormalBasis::coordinate(3, &[1, 2]).unwrap();
        let r = harmonic_bound(&a, &k, 2.5, 1).unwrap();
        assert_abs_diff_eq!(r.kappa.unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.delta, 8.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn harmonic_bound_tilted_subspace() {
        let a = diag(&[1.0, 2.0, 4.0, 7.0]);
        let k = tilted(4, &[(1, 0, 0.2), (2, 3, 0.1)]);
        let r = harmonic_bound(&a, &k, 2.5, 1).unwrap();
        assert!(r.lhs > 0.0 && r.satisfied, "{r:?}");
        assert_abs_diff_eq!(r.sin_angle_to_k, 0.2f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn deflated_condition_number_example() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let x = OrthonormalBasis::coordinate(3, &[0, 1]).unwrap();
        let k = tilted(3, &[(0, 1, 0.3)]);
        let r = deflated_harmonic_bound(&a, &x, &k, 1.6, 0).unwrap();
        assert_abs_diff_eq!(r.kappa.unwrap(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.shift_condition_number(1.6), 6.0, epsilon = 1e-12);
        assert!(r.satisfied);
        assert_eq!(r.bound_id, BoundId::Deflated);
    }

    #[test]
    fn deflated_full_space_matches_harmonic() {
        let a = diag(&[1.0, 2.0, 4.0, 7.0]);
        let x = OrthonormalBasis::coordinate(4, &[0, 1, 2, 3]).unwrap();
        let k = tilted(4, &[(1, 0, 0.2), (2, 3, 0.1)]);
        let d = deflated_harmonic_bound(&a, &x, &k, 2.5, 1).unwrap();
        let h = harmonic_bound(&a, &k, 2.5, 1).unwrap();
        for (u, v) in [(d.lhs, h.lhs), (d.rhs, h.rhs), (d.gamma, h.gamma), (d.delta, h.delta)] {
            assert_abs_diff_eq!(u, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn deflated_rejects_bad_inputs() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let x = OrthonormalBasis::coordinate(3, &[0, 1]).unwrap();
        let outside = tilted(3, &[(0, 2, 0.3)]);
        assert!(matches!(deflated_harmonic_bound(&a, &x, &outside, 1.6, 0), Err(Error::SubspaceNotContained { .. })));
        let skew = tilted(3, &[(0, 2, 0.3), (1, 0, 0.0)]);
        assert!(matches!(deflated_harmonic_bound(&a, &skew, &skew, 1.6, 0), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn eigenspace_bound_cases() {
        let a = diag(&[1.0, 3.0, 3.0, 6.0]);
        let k = OrthonormalBasis::coordinate(4, &[1, 2, 3]).unwrap();
        let r = eigenspace_harmonic_bound(&a, &k, 2.8, 3.0, None).unwrap();
        assert!(r.lhs < 1e-14 && r.satisfied);
        let r = eigenspace_harmonic_bound(&a, &k, 2.8, 3.0, Some(3)).unwrap();
        assert_eq!(r.delta, f64::INFINITY);
        assert_eq!(r.rhs, r.kappa.unwrap() * r.sin_angle_to_k);
        let k = tilted(4, &[(1, 0, 0.1), (2, 3, 0.15), (3, 0, 0.05)]);
        let r = eigenspace_harmonic_bound(&a, &k, 2.8, 3.0, None).unwrap();
        assert!(r.satisfied, "{r:?}");
    }

    #[test]
    fn t_harmonic_identity_matches_harmonic() {
        let a = diag(&[1.0, 2.0, 4.0, 7.0]);
        let k = tilted(4, &[(1, 0, 0.2), (2, 3, 0.1)]);
        let t = t_harmonic_bound(&a, &k, 2.5, &PreconditionerSpec::identity(4), 1, false).unwrap();
        let h = harmonic_bound(&a, &k, 2.5, 1).unwrap();
        assert_abs_diff_eq!(t.lhs, h.lhs, epsilon = 1e-12);
        assert_abs_diff_eq!(t.rhs, h.rhs, epsilon = 1e-12);
    }

    #[test]
    fn t_harmonic_preconditioner_kappas() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let k = tilted(3, &[(1, 0, 0.2), (2, 0, 0.1)]);
        let abs = PreconditionerSpec::abs_value_inverse(&a, 2.5).unwrap();
        let r = t_harmonic_bound(&a, &k, 2.5, &abs, 1, false).unwrap();
        assert_abs_diff_eq!(r.kappa.unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        assert!(r.satisfied);
        let sq = PreconditionerSpec::shift_inverse_squared(&a, 2.5).unwrap();
        let r = t_harmonic_bound(&a, &k, 2.5, &sq, 1, false).unwrap();
        assert_abs_diff_eq!(r.kappa.unwrap(), 1.0, epsilon = 1e-12);
        assert!(r.satisfied);
    }

    #[test]
    fn t_harmonic_rejects_non_commuting() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let t = SymmetricMatrix::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let spec = PreconditionerSpec::general(t).unwrap();
        let k = OrthonormalBasis::coordinate(3, &[0, 1]).unwrap();
        assert!(matches!(t_harmonic_bound(&a, &k, 2.5, &spec, 1, false), Err(Error::NotCommuting { .. })));
        assert!(t_harmonic_bound(&a, &k, 2.5, &spec, 1, true).is_ok());
    }

    #[test]
    fn b_inverse_examples() {
        let a = diag(&[1.0, 3.0]);
        let full = OrthonormalBasis::coordinate(2, &[0, 1]).unwrap();
        assert_abs_diff_eq!(b_inverse_norm(&a, &full, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = OrthonormalBasis::new(DMatrix::from_column_slice(2, 1, &[h, h])).unwrap();
        assert!(matches!(b_inverse_norm(&a, &k, 2.0), Err(Error::SingularB { .. })));
        let spd = diag(&[0.5, 2.0, 3.0]);
        let k = tilted(3, &[(0, 1, 0.4)]);
        assert!(b_inverse_norm(&spd, &k, 0.0).unwrap() <= 2.0 + 1e-12);
    }
}
