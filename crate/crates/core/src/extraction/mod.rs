//! Rayleigh–Ritz extraction: standard (Galerkin), harmonic (Petrov–Galerkin
//! against `(A − σI)K`) and T-harmonic (the same condition in the `T` inner
//! product), plus the rules that pair extracted vectors with target eigenpairs.

mod harmonic;
mod pairing;
mod standard;
pub(crate) mod t_harmonic;

pub use harmonic::{harmonic_rayleigh_ritz, harmonic_via_shift_invert};
pub use pairing::{pair_to_eigenvector, select_theta_k, PairingResult};
pub(crate) use pairing::pair_with_vector;
pub use standard::rayleigh_ritz;
pub use t_harmonic::{commutation_residual, t_harmonic_rayleigh_ritz, t_harmonic_with_sqrt};

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{OrthonormalBasis, SpectralMatrix, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Standard,
    Harmonic,
    THarmonic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Standard => "standard",
            Method::Harmonic => "harmonic",
            Method::THarmonic => "t_harmonic",
        })
    }
}

/// Extracted pairs from one subspace.
///
/// Values are ascending with `INF` (S-neutral harmonic directions) last.
/// Every vector has unit norm and a positive largest-magnitude entry;
/// `vectors = K·coefficients` column by column.
#[derive(Debug, Clone)]
pub struct RitzSet {
    pub method: Method,
    pub shift: Option<f64>,
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub coefficients: DMatrix<f64>,
    /// `τ = 1/(θ − σ)` for harmonic methods.
    pub tau: Option<Vec<f64>>,
}

impl RitzSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, j: usize) -> DVector<f64> {
        self.vectors.column(j).into_owned()
    }

    pub fn finite_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.values[j].is_finite()).collect()
    }

    /// `‖A·v_j − θ_j·v_j‖` per pair (`INF` for infinite values).
    pub fn residual_norms(&self, a: &SymmetricMatrix) -> Vec<f64> {
        let av = a.matrix() * &self.vectors;
        (0..self.len())
            .map(|j| {
                let theta = self.values[j];
                if theta.is_finite() {
                    (av.column(j) - self.vectors.column(j) * theta).norm()
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }

    /// `‖Wᵀ(A·v_j − θ_j·v_j)‖` for a test basis `W` (the Galerkin/Petrov–Galerkin residual).
    pub fn projected_residuals(&self, a: &SymmetricMatrix, test: &DMatrix<f64>) -> Vec<f64> {
        let av = a.matrix() * &self.vectors;
        (0..self.len())
            .map(|j| {
                let theta = self.values[j];
                if theta.is_finite() {
                    let r = av.column(j) - self.vectors.column(j) * theta;
                    (test.transpose() * r).norm()
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }
}

/// Test basis defining the orthogonality condition of an extraction:
/// `K`, `(A − σI)K` or `T(A − σI)K`.
pub fn test_basis(a: &SpectralMatrix, k: &OrthonormalBasis, set: &RitzSet, t: Option<&SymmetricMatrix>) -> DMatrix<f64> {
    match (set.method, set.shift) {
        (Method::Standard, _) | (_, None) => k.columns().clone(),
        (Method::Harmonic, Some(sigma)) => a.matrix().shifted(sigma).matrix() * k.columns(),
        (Method::THarmonic, Some(sigma)) => {
            let sk = a.matrix().shifted(sigma).matrix() * k.columns();
            match t {
                Some(t) => t.matrix() * sk,
                None => sk,
            }
        }
    }
}

pub(crate) struct RawPair {
    pub value: f64,
    pub tau: Option<f64>,
    pub coefficient: DVector<f64>,
}

/// Maps coefficient vectors through `K`, normalizes and orders the pairs.
pub(crate) fn assemble(method: Method, shift: Option<f64>, k: &OrthonormalBasis, mut pairs: Vec<RawPair>) -> RitzSet {
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    let n = k.ambient_dim();
    let s = pairs.len();
    let mut vectors = DMatrix::zeros(n, s);
    let mut coefficients = DMatrix::zeros(k.dim(), s);
    for (j, p) in pairs.iter().enumerate() {
        let mut c = p.coefficient.clone();
        let mut v = k.columns() * &c;
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
            c /= norm;
        }
        let lead = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            v.neg_mut();
            c.neg_mut();
        }
        vectors.set_column(j, &v);
        coefficients.set_column(j, &c);
    }
    let tau = if pairs.iter().any(|p| p.tau.is_some()) {
        Some(pairs.iter().map(|p| p.tau.unwrap_or(f64::NAN)).collect())
    } else {
        None
    };
    RitzSet { method, shift, values: pairs.iter().map(|p| p.value).collect(), vectors, coefficients, tau }
}
