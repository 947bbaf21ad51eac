//! Commuting SPD preconditioners for T-harmonic extraction.
//!
//! Every constructor except [`PreconditionerSpec::general`] builds `T` on the
//! eigenbasis of `A`, so the eigenvalues `t_j` of `T` paired with each `λ_j`
//! are known exactly and `κ(T^{1/2}(A − σI))` is evaluated in scalar
//! arithmetic as `max|ν_j| / min|ν_j|` with `ν_j = sqrt(t_j)·(λ_j − σ)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::extraction::t_harmonic::commutation_residual;
use crate::linalg::{jacobi_eigh, spd_sqrt, SpectralMatrix, SymmetricMatrix};
use crate::tol::TOL_SPD;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerKind {
    Identity,
    AbsValueInverse,
    ShiftInverseSquared,
    Polynomial,
    /// Arbitrary SPD matrix with no known relation to `A`.
    General,
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreconditionerKind::Identity => "identity",
            PreconditionerKind::AbsValueInverse => "absinv",
            PreconditionerKind::ShiftInverseSquared => "invsq",
            PreconditionerKind::Polynomial => "poly",
            PreconditionerKind::General => "general",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PreconditionerSpec {
    pub kind: PreconditionerKind,
    pub sigma: Option<f64>,
    pub coefficients: Option<Vec<f64>>,
    realized: SymmetricMatrix,
    sqrt: SymmetricMatrix,
    /// `t_j` on the eigenbasis of the matrix the spec was built for.
    spectrum: Option<Vec<f64>>,
}

/// Output of [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Smallest eigenvalue of `T`.
    pub spd_margin: f64,
    /// `‖TA − AT‖_F / (‖A‖_F·‖T‖_F)`.
    pub commutation_residual: f64,
    /// `κ(T^{1/2}(A − σI))` when the spec carries a shift.
    pub kappa: Option<f64>,
}

impl PreconditionerSpec {
    pub fn identity(n: usize) -> Self {
        Self {
            kind: PreconditionerKind::Identity,
            sigma: None,
            coefficients: None,
            realized: SymmetricMatrix::identity(n),
            sqrt: SymmetricMatrix::identity(n),
            spectrum: Some(vec![1.0; n]),
        }
    }

    /// `T = |A − σI|⁻¹`.
    pub fn abs_value_inverse(a: &SpectralMatrix, sigma: f64) -> Result<Self> {
        a.check_shift(sigma)?;
        let t: Vec<f64> = a.eigenvalues().iter().map(|l| 1.0 / (l - sigma).abs()).collect();
        Ok(Self::on_eigenbasis(a, PreconditionerKind::AbsValueInverse, Some(sigma), None, t))
    }

    /// `T = (A − σI)⁻²`.
    pub fn shift_inverse_squared(a: &SpectralMatrix, sigma: f64) -> Result<Self> {
        a.check_shift(sigma)?;
        let t: Vec<f64> = a.eigenvalues().iter().map(|l| 1.0 / ((l - sigma) * (l - sigma))).collect();
        Ok(Self::on_eigenbasis(a, PreconditionerKind::ShiftInverseSquared, Some(sigma), None, t))
    }

    /// `T = p(A)` with `p(t) = c₀ + c₁t + c₂t² + …`.
    pub fn polynomial_commuting(a: &SpectralMatrix, coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptySet);
        }
        let values: Vec<f64> = a
            .eigenvalues()
            .iter()
            .map(|&l| coefficients.iter().rev().fold(0.0, |acc, c| acc * l + c))
            .collect();
        let max = values.iter().copied().fold(0.0f64, |m, v| m.max(v.abs()));
        for (&l, &v) in a.eigenvalues().iter().zip(&values) {
            if !(v > TOL_SPD * max) {
                return Err(Error::NotPositiveOnSpectrum { eigenvalue: l, value: v });
            }
        }
        Ok(Self::on_eigenbasis(a, PreconditionerKind::Polynomial, None, Some(coefficients.to_vec()), values))
    }

    /// Wraps an arbitrary SPD matrix.
    pub fn general(t: SymmetricMatrix) -> Result<Self> {
        let sqrt = spd_sqrt(&t)?;
        Ok(Self { kind: PreconditionerKind::General, sigma: None, coefficients: None, realized: t, sqrt, spectrum: None })
    }

    fn on_eigenbasis(
        a: &SpectralMatrix,
        kind: PreconditionerKind,
        sigma: Option<f64>,
        coefficients: Option<Vec<f64>>,
        t: Vec<f64>,
    ) -> Self {
        let q = a.eig().vectors();
        let build = |f: &dyn Fn(f64) -> f64| {
            let mut scaled = q.clone();
            for (j, &tj) in t.iter().enumerate() {
                scaled.column_mut(j).scale_mut(f(tj));
            }
            SymmetricMatrix::symmetrize(&scaled * q.transpose())
        };
        let realized = build(&|x| x);
        let sqrt = build(&f64::sqrt);
        Self { kind, sigma, coefficients, realized, sqrt, spectrum: Some(t) }
    }

    pub fn realized(&self) -> &SymmetricMatrix {
        &self.realized
    }

    /// `T^{1/2}`.
    pub fn sqrt(&self) -> &SymmetricMatrix {
        &self.sqrt
    }

    /// `κ(T^{1/2}(A − σI)) = |ν_max / ν_min|`.
    ///
    /// Uses the stored eigenbasis spectrum when available; otherwise the
    /// eigenvalues of the symmetrized product `T^{1/2}(A − σI)`, which is
    /// symmetric exactly when `T` and `A` commute.
    pub fn kappa_with_shift(&self, a: &SpectralMatrix, sigma: f64) -> Result<f64> {
        a.check_shift(sigma)?;
        let nu: Vec<f64> = match &self.spectrum {
            Some(t) => t.iter().zip(a.eigenvalues()).map(|(tj, l)| tj.sqrt() * (l - sigma)).collect(),
            None => {
                let product = self.sqrt.matrix() * a.matrix().shifted(sigma).matrix();
                jacobi_eigh(&SymmetricMatrix::symmetrize(product))?.values().to_vec()
            }
        };
        let (lo, hi) = nu.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
        Ok(hi / lo)
    }
}

/// SPD margin, commutation residual and (with a shift) `κ(T^{1/2}(A − σI))`.
pub fn validate(spec: &PreconditionerSpec, a: &SpectralMatrix) -> Diagnostics {
    let spd_margin = match &spec.spectrum {
        Some(t) => t.iter().copied().fold(f64::INFINITY, f64::min),
        None => jacobi_eigh(&spec.realized).map(|e| e.values()[0]).unwrap_or(f64::NAN),
    };
    let kappa = spec.sigma.and_then(|s| spec.kappa_with_shift(a, s).ok());
    Diagnostics { spd_margin, commutation_residual: commutation_residual(a.matrix(), &spec.realized), kappa }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn diag(v: &[f64]) -> SpectralMatrix {
        SpectralMatrix::new(SymmetricMatrix::from_diagonal(v).unwrap()).unwrap()
    }

    fn rotated() -> (SpectralMatrix, Vec<f64>) {
        let c = 0.6;
        let s = 0.8;
        let q = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let d = vec![-1.0, 0.5, 3.0];
        let eig = crate::EigenDecomposition::new(d.clone(), q).unwrap();
        let a = SymmetricMatrix::new(eig.reconstruct()).unwrap();
        (SpectralMatrix::from_parts(a, eig).unwrap(), d)
    }

    #[test]
    fn absolute_inverse_on_diagonal() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let t = PreconditionerSpec::abs_value_inverse(&a, 2.5).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[1.0 / 1.5, 2.0, 1.0 / 1.5]));
        assert_abs_diff_eq!((t.realized().matrix() - expected).norm(), 0.0, epsilon = 1e-15);
        let d = validate(&t, &a);
        assert_abs_diff_eq!(d.kappa.unwrap(), 3f64.sqrt(), epsilon = 1e-15);
        let a0 = diag(&[1.0, -2.0, 4.0]);
        let t0 = PreconditionerSpec::abs_value_inverse(&a0, 0.0).unwrap();
        assert_abs_diff_eq!(t0.realized().matrix()[(1, 1)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn absolute_inverse_commutes_with_rotated_matrix() {
        let (a, d) = rotated();
        let t = PreconditionerSpec::abs_value_inverse(&a, 1.0).unwrap();
        let ta = t.realized().matrix() * a.matrix().matrix();
        assert!((&ta - ta.transpose()).norm() < 1e-10);
        let expected = a.eig().apply_function(|l| 1.0 / (l - 1.0).abs());
        assert!((t.realized().matrix() - expected).norm() < 1e-14);
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn inverse_squared_examples() {
        let t = PreconditionerSpec::shift_inverse_squared(&diag(&[1.0, 3.0]), 2.0).unwrap();
        assert_eq!(t.realized().matrix(), &DMatrix::identity(2, 2));
        let a = diag(&[0.0, 4.0]);
        let t = PreconditionerSpec::shift_inverse_squared(&a, 1.0).unwrap();
        assert_abs_diff_eq!(t.realized().matrix()[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.realized().matrix()[(1, 1)], 1.0 / 9.0, epsilon = 1e-15);
        assert_eq!(t.kappa_with_shift(&a, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn polynomial_examples() {
        let a = diag(&[1.0, 2.0]);
        let t = PreconditionerSpec::polynomial_commuting(&a, &[1.0]).unwrap();
        assert_eq!(t.realized().matrix(), &DMatrix::identity(2, 2));
        let t = PreconditionerSpec::polynomial_commuting(&a, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.realized().matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]));
        assert!(matches!(
            PreconditionerSpec::polynomial_commuting(&a, &[-3.0, 1.0]),
            Err(Error::NotPositiveOnSpectrum { .. })
        ));
    }

    #[test]
    fn identity_diagnostics() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let d = validate(&PreconditionerSpec::identity(3), &a);
        assert_eq!(d.spd_margin, 1.0);
        assert_eq!(d.commutation_residual, 0.0);
        assert_eq!(d.kappa, None);
    }

    #[test]
    fn non_commuting_residual_reported() {
        let a = diag(&[1.0, 2.0, 4.0]);
        let t = SymmetricMatrix::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5])).unwrap();
        let spec = PreconditionerSpec::general(t).unwrap();
        let d = validate(&spec, &a);
        assert!(d.commutation_residual > 1e-8);
        assert!(d.spd_margin > 0.0);
    }

    #[test]
    fn general_kappa_matches_eigenbasis_kappa_when_commuting() {
        let (a, _) = rotated();
        let spec = PreconditionerSpec::abs_value_inverse(&a, 1.0).unwrap();
        let general = PreconditionerSpec::general(spec.realized().clone()).unwrap();
        let k1 = spec.kappa_with_shift(&a, 1.0).unwrap();
        let k2 = general.kappa_with_shift(&a, 1.0).unwrap();
        assert_abs_diff_eq!(k1, k2, epsilon = 1e-12);
        assert_abs_diff_eq!(k1, (2.0f64 / 0.5).sqrt(), epsilon = 1e-14);
    }
}
