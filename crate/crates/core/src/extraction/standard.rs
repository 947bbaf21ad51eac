use super::{assemble, Method, RawPair, RitzSet};
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, OrthonormalBasis, SymmetricMatrix};

/// Standard Rayleigh–Ritz: eigenpairs of the projected matrix `KᵀAK`
/// give Ritz values `μ` and vectors `u = K·c`.
pub fn rayleigh_ritz(a: &SymmetricMatrix, k: &OrthonormalBasis) -> Result<RitzSet> {
    if k.ambient_dim() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: k.ambient_dim() });
    }
    let projected = k.columns().transpose() * a.matrix() * k.columns();
    let eig = jacobi_eigh(&SymmetricMatrix::symmetrize(projected))?;
    let pairs = eig
        .values()
        .iter()
        .enumerate()
        .map(|(j, &mu)| RawPair { value: mu, tau: None, coefficient: eig.vector(j) })
        .collect();
    Ok(assemble(Method::Standard, None, k, pairs))
}
