use nalgebra::DMatrix;

use super::{EigenDecomposition, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::tol::{JACOBI_OFF_DIAGONAL, JACOBI_ROTATION_FACTOR};

/// Outcome of the cyclic Jacobi iteration, converged or not.
pub(crate) struct JacobiState {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub converged: bool,
    pub rotations: usize,
    pub off_diagonal: f64,
}

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Sweeps all `(p, q)` pairs in row order; a rotation is skipped when the
/// pivot is already negligible against its diagonal pair. Stops once the
/// off-diagonal Frobenius mass falls below `1e-12·‖A‖_F`. Results are
/// sorted ascending and each eigenvector's largest-magnitude entry is positive.
pub fn jacobi_eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let state = jacobi_iterate(a.matrix());
    if !state.converged {
        return Err(Error::NoConvergence { rotations: state.rotations, off_diagonal: state.off_diagonal });
    }
    Ok(finish(state))
}

pub(crate) fn finish(state: JacobiState) -> EigenDecomposition {
    let mut vectors = state.vectors;
    for j in 0..vectors.ncols() {
        fix_sign(&mut vectors, j);
    }
    EigenDecomposition::sorted(state.values, vectors)
}

pub(crate) fn fix_sign(m: &mut DMatrix<f64>, j: usize) {
    let mut best = 0usize;
    for i in 0..m.nrows() {
        if m[(i, j)].abs() > m[(best, j)].abs() {
            best = i;
        }
    }
    if m[(best, j)] < 0.0 {
        m.column_mut(j).neg_mut();
    }
}

pub(crate) fn jacobi_iterate(m: &DMatrix<f64>) -> JacobiState {
    let n = m.nrows();
    // row-major working copy
    let mut a: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_OFF_DIAGONAL * norm;
    let budget = JACOBI_ROTATION_FACTOR * n * n;
    let mut rotations = 0usize;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut off_diagonal = off(&a);
    while off_diagonal > threshold {
        if rotations >= budget {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
                rotations += 1;
            }
        }
        off_diagonal = off(&a);
    }

    JacobiState {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: DMatrix::from_fn(n, n, |i, j| v[i * n + j]),
        converged: off_diagonal <= threshold,
        rotations,
        off_diagonal,
    }
}
