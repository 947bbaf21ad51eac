//! Dense real symmetric kernels: eigendecomposition, orthonormalization,
//! projectors, norms and angles between vectors and subspaces.

mod angles;
mod eigh;
mod norms;
mod ops;
mod qr;
pub mod text;

pub use angles::{sin_angle_subspaces, sin_angle_vector_subspace, sin_angle_vectors};
pub use eigh::jacobi_eigh;
pub use norms::{frobenius_norm, spectral_norm};
pub use ops::{projector, shift_invert_apply, spd_sqrt};
pub use qr::{cholesky, householder_qr, qr_orthonormalize};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol::{CLUSTER_GAP, TOL_EIG, TOL_ORTH, TOL_SHIFT};

/// Dense real symmetric matrix. Entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Symmetrizes `(M + Mᵀ)/2`. Rejects non-square or non-finite input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionError("matrix order must be positive".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrize(m))
    }

    pub(crate) fn symmetrize(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut out = m;
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self(out)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `A − σI`.
    pub fn shifted(&self, sigma: f64) -> SymmetricMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= sigma;
        }
        Self(m)
    }
}

/// Full spectrum with orthonormal eigenvectors; eigenvalues ascending,
/// column `j` of `vectors` pairs with `values[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Sorts the pairs ascending. Fails if `vectors` is not orthonormal.
    pub fn new(values: Vec<f64>, vectors: DMatrix<f64>) -> Result<Self> {
        let n = values.len();
        if vectors.nrows() != n || vectors.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: vectors.ncols() });
        }
        let deviation = orthonormality_defect(&vectors);
        if deviation > TOL_ORTH {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self::sorted(values, vectors))
    }

    pub(crate) fn sorted(values: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&j| values[j]).collect();
        let sorted_vectors = DMatrix::from_fn(vectors.nrows(), order.len(), |i, j| vectors[(i, order[j])]);
        Self { values: sorted_values, vectors: sorted_vectors }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, j: usize) -> DVector<f64> {
        self.vectors.column(j).into_owned()
    }

    /// `Q·diag(λ)·Qᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply_function(|l| l)
    }

    /// `Q·diag(f(λ))·Qᵀ` for any scalar function.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fj = f(l);
            scaled.column_mut(j).scale_mut(fj);
        }
        &scaled * self.vectors.transpose()
    }

    /// Indices of eigenvalues in the same cluster as `value`
    /// (within `CLUSTER_GAP·scale` of it).
    pub fn cluster_indices(&self, value: f64) -> Vec<usize> {
        let scale = self.values.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &l)| (l - value).abs() <= CLUSTER_GAP * scale)
            .map(|(j, _)| j)
            .collect()
    }
}

/// n×s matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: DMatrix<f64>,
}

impl OrthonormalBasis {
    /// Validates `‖CᵀC − I‖_F ≤ TOL_ORTH`. Use [`qr_orthonormalize`] for arbitrary columns.
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        if columns.ncols() == 0 || columns.ncols() > columns.nrows() {
            return Err(Error::DimensionError(format!(
                "basis of {} columns in dimension {}",
                columns.ncols(),
                columns.nrows()
            )));
        }
        let deviation = orthonormality_defect(&columns);
        if deviation > TOL_ORTH {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { columns })
    }

    pub(crate) fn from_trusted(columns: DMatrix<f64>) -> Self {
        Self { columns }
    }

    /// Standard basis vectors `e_i` for the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = DMatrix::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::DimensionError(format!("index {i} out of range for dimension {n}")));
            }
            m[(i, j)] = 1.0;
        }
        Self::new(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn into_columns(self) -> DMatrix<f64> {
        self.columns
    }
}

fn orthonormality_defect(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    (gram - DMatrix::identity(m.ncols(), m.ncols())).norm()
}

/// A symmetric matrix bundled with its eigendecomposition.
///
/// Every spectral quantity (shift-inverse, κ, λ_min/λ_max, eigenvectors)
/// is read from the stored decomposition, so generated test matrices can
/// carry their exact construction spectrum.
#[derive(Debug, Clone)]
pub struct SpectralMatrix {
    matrix: SymmetricMatrix,
    eig: EigenDecomposition,
}

impl SpectralMatrix {
    pub fn new(matrix: SymmetricMatrix) -> Result<Self> {
        let eig = jacobi_eigh(&matrix)?;
        Ok(Self { matrix, eig })
    }

    /// Pairs a matrix with a known decomposition, checking the residual
    /// `‖A·q_j − λ_j·q_j‖ ≤ TOL_EIG·‖A‖_F` for every column.
    pub fn from_parts(matrix: SymmetricMatrix, eig: EigenDecomposition) -> Result<Self> {
        if eig.len() != matrix.order() {
            return Err(Error::DimensionMismatch { expected: matrix.order(), found: eig.len() });
        }
        let scale = matrix.frobenius_norm().max(f64::MIN_POSITIVE);
        let av = matrix.matrix() * eig.vectors();
        for (j, &l) in eig.values().iter().enumerate() {
            let residual = (av.column(j) - eig.vectors().column(j) * l).norm();
            if residual > TOL_EIG * scale {
                return Err(Error::NotInvariant { residual: residual / scale });
            }
        }
        Ok(Self { matrix, eig })
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eig.values()
    }

    pub fn eigenvector(&self, j: usize) -> DVector<f64> {
        self.eig.vector(j)
    }

    /// `‖A‖_F` taken from the spectrum.
    pub fn frobenius_norm(&self) -> f64 {
        self.eig.values().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `min_j |λ_j − σ|`.
    pub fn shift_gap(&self, sigma: f64) -> f64 {
        self.eig.values().iter().map(|l| (l - sigma).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Fails with `SingularShift` when σ lies within `TOL_SHIFT·‖A‖_F` of the spectrum.
    pub fn check_shift(&self, sigma: f64) -> Result<()> {
        let gap = self.shift_gap(sigma);
        if !sigma.is_finite() || gap <= TOL_SHIFT * self.frobenius_norm() {
            return Err(Error::SingularShift { sigma, gap });
        }
        Ok(())
    }

    /// `κ(A − σI) = max|λ_j − σ| / min|λ_j − σ|`.
    pub fn shift_condition_number(&self, sigma: f64) -> f64 {
        shift_condition_number(self.eig.values(), sigma)
    }

    /// Eigenvector basis for the cluster containing eigenvalue `value`.
    pub fn eigenspace(&self, value: f64) -> Result<(Vec<usize>, OrthonormalBasis)> {
        let idx = self.eig.cluster_indices(value);
        if idx.is_empty() {
            return Err(Error::NotAnEigenvalue { value });
        }
        let cols = DMatrix::from_fn(self.order(), idx.len(), |i, j| self.eig.vectors()[(i, idx[j])]);
        Ok((idx, OrthonormalBasis::from_trusted(cols)))
    }
}

/// `max|λ_j − σ| / min|λ_j − σ|` over the given spectrum.
pub fn shift_condition_number(values: &[f64], sigma: f64) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
        let d = (l - sigma).abs();
        (lo.min(d), hi.max(d))
    });
    hi / lo
}
