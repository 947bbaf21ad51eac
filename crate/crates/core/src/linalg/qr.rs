use nalgebra::DMatrix;

use super::OrthonormalBasis;
use crate::error::{Error, Result};
use crate::tol::TOL_RANK;

/// Thin Householder QR `M = Q·R` with `diag(R) ≥ 0`.
///
/// Fails with `RankDeficient` when a pivot `|R_jj|` drops below
/// `TOL_RANK·‖M‖_F`.
pub fn householder_qr(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, s) = m.shape();
    if s == 0 || s > n {
        return Err(Error::DimensionError(format!("QR of {n}x{s} matrix needs 1 <= s <= n")));
    }
    let scale = m.norm();
    let mut work = m.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(s);

    for j in 0..s {
        let alpha: f64 = (j..n).map(|i| work[(i, j)] * work[(i, j)]).sum::<f64>().sqrt();
        if !(alpha > TOL_RANK * scale) {
            return Err(Error::RankDeficient { column: j, pivot: alpha });
        }
        let x0 = work[(j, j)];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        // v = x - beta e1, normalized so that H = I - 2 v vᵀ
        let mut v: Vec<f64> = (j..n).map(|i| work[(i, j)]).collect();
        v[0] -= beta;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= vnorm);
        for c in j..s {
            let dot: f64 = v.iter().enumerate().map(|(k, vk)| vk * work[(j + k, c)]).sum();
            for (k, vk) in v.iter().enumerate() {
                work[(j + k, c)] -= 2.0 * vk * dot;
            }
        }
        reflectors.push(v);
    }

    let mut r = DMatrix::zeros(s, s);
    for i in 0..s {
        for c in i..s {
            r[(i, c)] = work[(i, c)];
        }
    }

    let mut q = DMatrix::identity(n, s);
    for (j, v) in reflectors.iter().enumerate().rev() {
        for c in 0..s {
            let dot: f64 = v.iter().enumerate().map(|(k, vk)| vk * q[(j + k, c)]).sum();
            if dot != 0.0 {
                for (k, vk) in v.iter().enumerate() {
                    q[(j + k, c)] -= 2.0 * vk * dot;
                }
            }
        }
    }

    for i in 0..s {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    Ok((q, r))
}

/// Orthonormal basis of `range(M)` through Householder QR.
pub fn qr_orthonormalize(m: &DMatrix<f64>) -> Result<OrthonormalBasis> {
    let (q, _) = householder_qr(m)?;
    Ok(OrthonormalBasis::from_trusted(q))
}

/// Lower Cholesky factor `L` with `M = L·Lᵀ`.
pub fn cholesky(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: m.ncols() });
    }
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::CholeskyFailure { pivot: j });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / ljj;
        }
    }
    Ok(l)
}
