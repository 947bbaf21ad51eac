use nalgebra::DMatrix;

use super::eigh::jacobi_iterate;

/// Largest singular value, as the square root of the largest eigenvalue of
/// the smaller Gram matrix (`MᵀM` or `MMᵀ`).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() >= m.ncols() { m.transpose() * m } else { m * m.transpose() };
    // an unconverged sweep still brackets the top eigenvalue to rounding level
    let state = jacobi_iterate(&gram);
    state.values.iter().copied().fold(0.0f64, f64::max).sqrt()
}

pub fn frobenius_norm(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_spectral_norm() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -4.0]);
        assert_abs_diff_eq!(spectral_norm(&m), 4.0, epsilon = 1e-15);
        assert_eq!(spectral_norm(&DMatrix::zeros(3, 2)), 0.0);
    }

    #[test]
    fn nilpotent_spectral_norm() {
        // MᵀM = diag(0, 4)
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert_abs_diff_eq!(spectral_norm(&m), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn frobenius_values() {
        assert_abs_diff_eq!(frobenius_norm(&DMatrix::identity(3, 3)), 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(frobenius_norm(&DMatrix::zeros(2, 2)), 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_abs_diff_eq!(frobenius_norm(&m), 10f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn wide_matrix_uses_row_gram() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 2.0]);
        assert_abs_diff_eq!(spectral_norm(&m), 3.0, epsilon = 1e-14);
    }
}
