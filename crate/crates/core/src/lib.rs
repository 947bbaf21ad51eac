//! Rayleigh–Ritz, harmonic and T-harmonic eigenpair extraction for dense
//! real symmetric matrices, together with evaluators for the a priori
//! angle bounds that govern the extracted vectors.

// `!(x > tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod extraction;
pub mod linalg;
pub mod precond;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{EigenDecomposition, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};
