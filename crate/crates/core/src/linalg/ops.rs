use nalgebra::DMatrix;

use super::{jacobi_eigh, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::tol::TOL_SPD;

/// Orthogonal projector `B·Bᵀ` onto `range(B)`.
pub fn projector(b: &OrthonormalBasis) -> SymmetricMatrix {
    SymmetricMatrix::symmetrize(b.columns() * b.columns().transpose())
}

/// `(A − σI)⁻¹·M` through the eigendecomposition:
/// `Q·diag(1/(λ_j − σ))·Qᵀ·M`.
pub fn shift_invert_apply(a: &SpectralMatrix, sigma: f64, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: m.nrows() });
    }
    a.check_shift(sigma)?;
    let q = a.eig().vectors();
    let mut coeffs = q.transpose() * m;
    for (j, &l) in a.eigenvalues().iter().enumerate() {
        coeffs.row_mut(j).scale_mut(1.0 / (l - sigma));
    }
    Ok(q * coeffs)
}

/// Symmetric positive definite square root `T^{1/2}`.
pub fn spd_sqrt(t: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = jacobi_eigh(t)?;
    let values = eig.values();
    let min_eig = values[0];
    let max_eig = values[values.len() - 1];
    if !(min_eig > TOL_SPD * max_eig.abs()) || !(min_eig > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    Ok(SymmetricMatrix::symmetrize(eig.apply_function(f64::sqrt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn projector_examples() {
        let p = projector(&OrthonormalBasis::coordinate(3, &[0]).unwrap());
        assert_eq!(p.matrix(), &DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 0.0, 0.0])));
        let p = projector(&OrthonormalBasis::new(DMatrix::identity(4, 4)).unwrap());
        assert_eq!(p.matrix(), &DMatrix::identity(4, 4));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b = OrthonormalBasis::new(DMatrix::from_column_slice(3, 1, &[h, h, 0.0])).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!((projector(&b).matrix() - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shift_invert_examples() {
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        let r = shift_invert_apply(&a, 0.0, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]));
        assert!(matches!(
            shift_invert_apply(&a, 2.0, &DMatrix::identity(2, 2)),
            Err(Error::SingularShift { .. })
        ));
        let a = SpectralMatrix::new(SymmetricMatrix::from_diagonal(&[1.0, 3.0]).unwrap()).unwrap();
        let r = shift_invert_apply(&a, 2.0, &DMatrix::from_column_slice(2, 1, &[1.0, 1.0])).unwrap();
        assert_eq!(r, DMatrix::from_column_slice(2, 1, &[-1.0, 1.0]));
    }

    #[test]
    fn spd_sqrt_examples() {
        let r = spd_sqrt(&SymmetricMatrix::from_diagonal(&[4.0, 9.0]).unwrap()).unwrap();
        assert_abs_diff_eq!((r.matrix() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).norm(), 0.0, epsilon = 1e-15);
        let r = spd_sqrt(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(r.matrix(), &DMatrix::identity(3, 3));
        let t = SymmetricMatrix::new(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        let r = spd_sqrt(&t).unwrap();
        assert_abs_diff_eq!((r.matrix() * r.matrix() - t.matrix()).norm(), 0.0, epsilon = 1e-14);
        let e = jacobi_eigh(&r).unwrap();
        assert_abs_diff_eq!(e.values()[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values()[1], 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn indefinite_rejected() {
        let t = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(spd_sqrt(&t), Err(Error::NotPositiveDefinite { .. })));
    }
}
