use nalgebra::DVector;

use super::{BoundId, BoundReport};
use crate::error::{Error, Result};
use crate::linalg::{qr_orthonormalize, sin_angle_subspaces, sin_angle_vectors, OrthonormalBasis, SpectralMatrix};
use crate::tol::TOL_SHIFT;

/// Angles and tightness constants behind the two-sided sine bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaProfile {
    /// `∠(x, y)` in radians.
    pub phi: f64,
    /// `∠(x, Ay)` in radians.
    pub phi_a: f64,
    /// `|λ / λ_max|` (largest magnitude eigenvalue).
    pub lower_factor: f64,
    /// `|λ / λ_min|` (smallest magnitude eigenvalue).
    pub upper_factor: f64,
    pub a0_sq: f64,
    pub a1_sq: f64,
}

fn check_nonsingular(a: &SpectralMatrix) -> Result<()> {
    let min_abs = a.eigenvalues().iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    if !(min_abs > TOL_SHIFT * a.frobenius_norm()) {
        return Err(Error::SingularMatrix { min_abs });
    }
    Ok(())
}

fn magnitude_extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())))
}

fn angle(x: &DVector<f64>, y: &DVector<f64>, sin: f64) -> f64 {
    let cos = (x.dot(y) / (x.norm() * y.norm())).abs();
    sin.atan2(cos)
}

/// Two-sided sine bound for an eigenpair `(λ, x)` and an arbitrary `y`:
/// `|λ/λ_max|·sin∠(x, Ay) ≤ sin∠(x, y) ≤ |λ/λ_min|·sin∠(x, Ay)`.
///
/// Returns the profile and the lower and upper one-sided reports.
pub fn lemma_sin_bounds(a: &SpectralMatrix, target_index: usize, y: &DVector<f64>) -> Result<(LemmaProfile, BoundReport, BoundReport)> {
    check_target(a, target_index)?;
    check_nonsingular(a)?;
    if y.len() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: y.len() });
    }
    let x = a.eigenvector(target_index);
    let lambda = a.eigenvalues()[target_index];
    let ay = a.matrix().matrix() * y;
    let sin_phi = sin_angle_vectors(&x, y)?;
    let sin_phi_a = sin_angle_vectors(&x, &ay)?;
    let (min_abs, max_abs) = magnitude_extremes(a.eigenvalues().iter().copied());
    let lower_factor = lambda.abs() / max_abs;
    let upper_factor = lambda.abs() / min_abs;
    let (a0_sq, a1_sq) = tightness_constants(a, target_index);

    let profile = LemmaProfile {
        phi: angle(&x, y, sin_phi),
        phi_a: angle(&x, &ay, sin_phi_a),
        lower_factor,
        upper_factor,
        a0_sq,
        a1_sq,
    };
    let lower = BoundReport::new(BoundId::LemmaLower, lower_factor * sin_phi_a, 0.0, f64::INFINITY, None, sin_phi);
    let upper = BoundReport::new(BoundId::LemmaUpper, sin_phi, 0.0, f64::INFINITY, Some(upper_factor), sin_phi_a);
    Ok((profile, lower, upper))
}

/// `a₀² = λ² / max_{j≠target} λ_j²` and `a₁² = λ² / min_{j≠target} λ_j²`.
pub fn lemma_tightness_profile(a: &SpectralMatrix, target_index: usize) -> Result<(f64, f64)> {
    check_target(a, target_index)?;
    if a.order() < 2 {
        return Err(Error::DimensionError("tightness profile needs n >= 2".into()));
    }
    check_nonsingular(a)?;
    Ok(tightness_constants(a, target_index))
}

fn tightness_constants(a: &SpectralMatrix, target_index: usize) -> (f64, f64) {
    let lambda = a.eigenvalues()[target_index];
    let others = a.eigenvalues().iter().enumerate().filter(|(j, _)| *j != target_index).map(|(_, &l)| l);
    let (min_abs, max_abs) = magnitude_extremes(others);
    let l2 = lambda * lambda;
    (l2 / (max_abs * max_abs), l2 / (min_abs * min_abs))
}

fn check_target(a: &SpectralMatrix, target_index: usize) -> Result<()> {
    if target_index >= a.order() {
        return Err(Error::DimensionError(format!("target index {target_index} out of range for order {}", a.order())));
    }
    Ok(())
}

/// Which side of the subspace transport inequality to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportDirection {
    /// `sin∠(X, BY) ≤ |ν_max/ν|·sin∠(X, Y)`.
    Forward,
    /// `sin∠(X, Y) ≤ |ν/ν_min|·sin∠(X, BY)`.
    Backward,
}

/// Transport of the sine between an eigenspace `X` (of the target
/// eigenvalue's cluster) and a subspace `Y` through `B = A` or `B = A − σI`,
/// where `ν` ranges over the eigenvalues of `B`.
pub fn subspace_sin_transport(
    a: &SpectralMatrix,
    sigma: Option<f64>,
    target_index: usize,
    y: &OrthonormalBasis,
    direction: TransportDirection,
) -> Result<BoundReport> {
    check_target(a, target_index)?;
    if y.ambient_dim() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: y.ambient_dim() });
    }
    let shift = sigma.unwrap_or(0.0);
    match sigma {
        Some(s) => a.check_shift(s)?,
        None => check_nonsingular(a)?,
    }
    let nu = a.eigenvalues()[target_index] - shift;
    let (min_abs, max_abs) = magnitude_extremes(a.eigenvalues().iter().map(|l| l - shift));
    let (_, x) = a.eigenspace(a.eigenvalues()[target_index])?;
    let by = qr_orthonormalize(&(a.matrix().shifted(shift).matrix() * y.columns()))?;
    let sin_xy = sin_angle_subspaces(&x, y)?;
    let sin_xby = sin_angle_subspaces(&x, &by)?;
    Ok(match direction {
        TransportDirection::Forward => {
            BoundReport::new(BoundId::TransportForward, sin_xby, 0.0, f64::INFINITY, Some(max_abs / nu.abs()), sin_xy)
        }
        TransportDirection::Backward => {
            BoundReport::new(BoundId::TransportBackward, sin_xy, 0.0, f64::INFINITY, Some(nu.abs() / min_abs), sin_xby)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn diag(v: &[f64]) -> SpectralMatrix {
        SpectralMatrix::new(SymmetricMatrix::from_diagonal(v).unwrap()).unwrap()
    }

    #[test]
    fn eigenvector_input_is_tight_at_zero() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let (p, lo, up) = lemma_sin_bounds(&a, 1, &a.eigenvector(1)).unwrap();
        assert_eq!((p.phi, p.phi_a), (0.0, 0.0));
        assert_eq!((lo.lhs, lo.rhs, up.lhs, up.rhs), (0.0, 0.0, 0.0, 0.0));
        assert!(lo.satisfied && up.satisfied);
    }

    #[test]
    fn hand_computed_two_by_two() {
        // y = (1,1)/√2, Ay = (1,2)/√2: sin∠(x,y) = 1/√2, sin∠(x,Ay) = 2/√5
        let a = diag(&[1.0, 2.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (_, lo, up) = lemma_sin_bounds(&a, 0, &DVector::from_column_slice(&[h, h])).unwrap();
        assert_abs_diff_eq!(lo.lhs, 0.5 * 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(lo.rhs, h, epsilon = 1e-15);
        assert_abs_diff_eq!(up.rhs, 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert!(lo.satisfied && up.satisfied);
        assert_abs_diff_eq!(lo.lhs, 0.44721, epsilon = 1e-5);
        assert_abs_diff_eq!(up.rhs, 0.89443, epsilon = 1e-5);
    }

    #[test]
    fn orthogonal_input_gives_unit_sines() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let (_, lo, up) = lemma_sin_bounds(&a, 0, &DVector::from_column_slice(&[0.0, 1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(lo.lhs, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(lo.rhs, 1.0);
        assert_eq!(up.lhs, 1.0);
        assert_eq!(up.rhs, 1.0);
    }

    #[test]
    fn tightness_constants_examples() {
        let a = diag(&[1.0, 2.0, 3.0]);
        let (a0, a1) = lemma_tightness_profile(&a, 0).unwrap();
        assert_abs_diff_eq!(a0, 1.0 / 9.0, epsilon = 1e-16);
        assert_abs_diff_eq!(a1, 0.25, epsilon = 1e-16);
        let (a0, a1) = lemma_tightness_profile(&a, 2).unwrap();
        assert_abs_diff_eq!(a0, 9.0 / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a1, 9.0, epsilon = 1e-15);
        assert_eq!(lemma_tightness_profile(&diag(&[2.0, 2.0]), 0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn singular_and_zero_inputs() {
        let a = diag(&[0.0, 2.0]);
        assert!(matches!(lemma_tightness_profile(&a, 1), Err(Error::SingularMatrix { .. })));
        let a = diag(&[1.0, 2.0]);
        assert_eq!(lemma_sin_bounds(&a, 0, &DVector::zeros(2)).unwrap_err(), Error::ZeroVector);
        assert!(matches!(lemma_tightness_profile(&diag(&[1.0]), 0), Err(Error::DimensionError(_))));
    }

    #[test]
    fn transport_on_one_dimensional_subspace() {
        let a = diag(&[1.0, 2.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let y = OrthonormalBasis::new(DMatrix::from_column_slice(2, 1, &[h, h])).unwrap();
        let f = subspace_sin_transport(&a, None, 0, &y, TransportDirection::Forward).unwrap();
        assert_abs_diff_eq!(f.lhs, 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.rhs, 2.0 * h, epsilon = 1e-15);
        assert!(f.satisfied);
        let b = subspace_sin_transport(&a, None, 0, &y, TransportDirection::Backward).unwrap();
        assert!(b.satisfied);
    }

    #[test]
    fn transport_on_eigenspace_is_trivial() {
        let a = diag(&[1.0, 1.0, 3.0]);
        let y = OrthonormalBasis::coordinate(3, &[0, 1]).unwrap();
        for dir in [TransportDirection::Forward, TransportDirection::Backward] {
            let r = subspace_sin_transport(&a, Some(0.5), 0, &y, dir).unwrap();
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        }
    }
}
