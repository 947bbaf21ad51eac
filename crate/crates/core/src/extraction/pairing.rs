use nalgebra::DVector;

use super::RitzSet;
use crate::error::{Error, Result};
use crate::linalg::SpectralMatrix;

/// Which extracted column stands for a target eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub index: usize,
    pub target_index: usize,
    pub target_lambda: f64,
}

const TIE: f64 = 1e-12;

/// Pairs the target eigenvector `x` with the finite-valued column maximizing
/// `|xᵀv|`; ties go to the smaller `|θ − λ|`, then the lower index.
pub fn pair_to_eigenvector(set: &RitzSet, a: &SpectralMatrix, target_index: usize) -> Result<PairingResult> {
    if target_index >= a.order() {
        return Err(Error::DimensionError(format!("target index {target_index} out of range")));
    }
    let lambda = a.eigenvalues()[target_index];
    let index = pair_with_vector(set, &a.eigenvector(target_index), lambda)?;
    Ok(PairingResult { index, target_index, target_lambda: lambda })
}

pub(crate) fn pair_with_vector(set: &RitzSet, x: &DVector<f64>, lambda: f64) -> Result<usize> {
    let mut best: Option<(usize, f64, f64)> = None;
    for j in set.finite_indices() {
        let overlap = x.dot(&set.vectors.column(j)).abs();
        let dist = (set.values[j] - lambda).abs();
        let better = match best {
            None => true,
            Some((_, bo, bd)) => overlap > bo + TIE || ((overlap - bo).abs() <= TIE && dist < bd),
        };
        if better {
            best = Some((j, overlap, dist));
        }
    }
    best.map(|(j, _, _)| j).ok_or(Error::NoFinitePair)
}

/// Indices of the `k` finite values closest to `lambda` (ties by lower
/// index), returned ascending.
pub fn select_theta_k(values: &[f64], lambda: f64, k: usize) -> Result<Vec<usize>> {
    let mut finite: Vec<usize> = (0..values.len()).filter(|&j| values[j].is_finite()).collect();
    if k > finite.len() {
        return Err(Error::InsufficientFiniteValues { requested: k, available: finite.len() });
    }
    finite.sort_by(|&a, &b| (values[a] - lambda).abs().total_cmp(&(values[b] - lambda).abs()).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = finite.into_iter().take(k).collect();
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::harmonic_via_shift_invert;
    use crate::linalg::{OrthonormalBasis, SymmetricMatrix};
    use nalgebra::DMatrix;

    #[test]
    fn invariant_extraction_pairs_exactly() {
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 2.0, 4.0]).unwrap()).unwrap();
        let k = OrthonormalBasis::coordinate(3, &[0, 2]).unwrap();
        let r = harmonic_via_shift_invert(&a, &k, 2.5).unwrap();
        let p = pair_to_eigenvector(&r, &a, 2).unwrap();
        assert_eq!(p.index, 1);
        assert_eq!(p.target_lambda, 4.0);
    }

    #[test]
    fn all_infinite_has_no_pair() {
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 3.0]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let k = OrthonormalBasis::new(DMatrix::from_column_slice(2, 1, &[h, h])).unwrap();
        let r = harmonic_via_shift_invert(&a, &k, 2.0).unwrap();
        assert_eq!(pair_to_eigenvector(&r, &a, 0), Err(Error::NoFinitePair));
    }

    #[test]
    fn theta_k_selection() {
        assert_eq!(select_theta_k(&[1.0, 4.0], 1.0, 1).unwrap(), vec![0]);
        assert_eq!(select_theta_k(&[1.0, 4.0], 2.4, 2).unwrap(), vec![0, 1]);
        assert_eq!(select_theta_k(&[0.9, 1.1, 5.0], 1.0, 2).unwrap(), vec![0, 1]);
        assert_eq!(select_theta_k(&[0.5, 1.5, f64::INFINITY], 1.0, 1).unwrap(), vec![0]);
        assert_eq!(
            select_theta_k(&[1.0, f64::INFINITY], 1.0, 2),
            Err(Error::InsufficientFiniteValues { requested: 2, available: 1 })
        );
    }
}
