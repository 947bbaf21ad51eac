use nalgebra::DMatrix;

use super::{coupling_norm, BoundId, BoundReport};
use crate::error::{Error, Result};
use crate::extraction::{pair_to_eigenvector, rayleigh_ritz, select_theta_k, RitzSet};
use crate::linalg::{qr_orthonormalize, sin_angle_subspaces, sin_angle_vector_subspace, sin_angle_vectors, OrthonormalBasis, SpectralMatrix};

/// Sine bound for a standard Ritz vector:
/// `sin∠(x, u) ≤ sqrt(1 + γ²/δ²)·sin∠(x, K)` with `γ = ‖P_K A (I − P_K)‖`
/// and `δ` the distance from `λ` to the other Ritz values.
pub fn saad_bound(a: &SpectralMatrix, k: &OrthonormalBasis, target_index: usize) -> Result<BoundReport> {
    let set = rayleigh_ritz(a.matrix(), k)?;
    let pair = pair_to_eigenvector(&set, a, target_index)?;
    let x = a.eigenvector(target_index);
    let lambda = pair.target_lambda;

    let gamma = coupling_norm(k.columns(), &(a.matrix().matrix() * k.columns()), false);
    let delta = set
        .values
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != pair.index)
        .map(|(_, mu)| (lambda - mu).abs())
        .fold(f64::INFINITY, f64::min);
    let lhs = sin_angle_vectors(&x, &set.vector(pair.index))?;
    let sin_k = sin_angle_vector_subspace(&x, k)?;
    Ok(BoundReport::new(BoundId::Saad, lhs, gamma, delta, None, sin_k))
}

/// `min_{i,j} |α_i − β_j|` (the Sylvester separation for symmetric blocks).
pub fn separation_delta_hermitian(alpha: &[f64], beta: &[f64]) -> Result<f64> {
    if alpha.is_empty() || beta.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(alpha
        .iter()
        .flat_map(|a| beta.iter().map(move |b| (a - b).abs()))
        .fold(f64::INFINITY, f64::min))
}

/// Subspace version for the eigenspace `X` of `target_lambda`:
/// `sin∠(X, U) ≤ sqrt(1 + γ_F²/δ²)·sin∠(X, K)` where `U` spans the `k`
/// Ritz vectors whose values are closest to `λ` (default `k = dim X`).
pub fn stewart_frobenius_bound(a: &SpectralMatrix, k: &OrthonormalBasis, target_lambda: f64, k_sel: Option<usize>) -> Result<BoundReport> {
    let (_, x) = a.eigenspace(target_lambda)?;
    let set = rayleigh_ritz(a.matrix(), k)?;
    let chosen = select_theta_k(&set.values, target_lambda, k_sel.unwrap_or(x.dim()))?;
    let gamma = coupling_norm(k.columns(), &(a.matrix().matrix() * k.columns()), true);
    let delta = complement_distance(&set.values, &chosen, |mu| (target_lambda - mu).abs());
    let u = span_of(&set, &chosen)?;
    let lhs = sin_angle_subspaces(&x, &u)?;
    let sin_k = sin_angle_subspaces(&x, k)?;
    Ok(BoundReport::new(BoundId::Stewart, lhs, gamma, delta, None, sin_k))
}

/// Minimum of `dist` over values not in `chosen`; `INF` when none remain.
pub(crate) fn complement_distance(values: &[f64], chosen: &[usize], dist: impl Fn(f64) -> f64) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(j, _)| !chosen.contains(j))
        .map(|(_, &v)| dist(v))
        .fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis for the span of the selected extracted vectors.
pub(crate) fn span_of(set: &RitzSet, chosen: &[usize]) -> Result<OrthonormalBasis> {
    let cols = DMatrix::from_fn(set.vectors.nrows(), chosen.len(), |i, j| set.vectors[(i, chosen[j])]);
    qr_orthonormalize(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> SpectralMatrix {
        SpectralMatrix::new(SymmetricMatrix::from_diagonal(v).unwrap()).unwrap()
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation_delta_hermitian(&[5.0], &[1.0, 2.0]).unwrap(), 3.0);
        assert_eq!(separation_delta_hermitian(&[2.0], &[2.0]).unwrap(), 0.0);
        assert_eq!(separation_delta_hermitian(&[], &[2.0]), Err(Error::EmptySet));
    }

    #[test]
    fn saad_contained_vector_is_exact() {
        let a = diag(&[1.0, 2.0, 4.0, 7.0]);
        let k = OrthonormalBasis::coordinate(4, &[1, 3]).unwrap();
        let r = saad_bound(&a, &k, 1).unwrap();
        assert_eq!((r.lhs, r.rhs, r.gamma), (0.0, 0.0, 0.0));
        assert_eq!(r.delta, 5.0);
        assert!(r.satisfied);
    }

    #[test]
    fn saad_one_dimensional_is_equality() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let k = OrthonormalBasis::new(DMatrix::from_column_slice(3, 1, &[0.6, 0.0, 0.8])).unwrap();
        let r = saad_bound(&a, &k, 0).unwrap();
        assert_eq!(r.delta, f64::INFINITY);
        assert_abs_diff_eq!(r.rhs, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(r.lhs, r.rhs, epsilon = 1e-15);
        assert!(r.satisfied);
    }

    #[test]
    fn saad_delta_matches_one_dimensional_separation() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let c = 0.3f64;
        let k = OrthonormalBasis::new(DMatrix::from_column_slice(3, 2, &[c.cos(), 0.0, c.sin(), 0.0, 1.0, 0.0])).unwrap();
        let r = saad_bound(&a, &k, 0).unwrap();
        let set = rayleigh_ritz(a.matrix(), &k).unwrap();
        let d = separation_delta_hermitian(&[set.values[1]], &[1.0]).unwrap();
        assert_abs_diff_eq!(r.delta, d, epsilon = 1e-14);
        assert!(r.satisfied);
    }

    #[test]
    fn stewart_invariant_and_full_selection() {
        let a = diag(&[2.0, 2.0, 5.0, 7.0]);
        let k = OrthonormalBasis::coordinate(4, &[0, 1, 3]).unwrap();
        let r = stewart_frobenius_bound(&a, &k, 2.0, None).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.satisfied);
        let r = stewart_frobenius_bound(&a, &k, 2.0, Some(3)).unwrap();
        assert_eq!(r.delta, f64::INFINITY);
        assert_eq!(r.rhs, r.sin_angle_to_k);
    }

    #[test]
    fn stewart_rejects_non_eigenvalue() {
        let a = diag(&[2.0, 2.0, 5.0]);
        let k = OrthonormalBasis::coordinate(3, &[0, 1]).unwrap();
        assert!(matches!(stewart_frobenius_bound(&a, &k, 3.0, None), Err(Error::NotAnEigenvalue { .. })));
    }
}
