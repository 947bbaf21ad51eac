#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ritzbound_core::linalg::qr_orthonormalize;
use ritzbound_core::{EigenDecomposition, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix via nalgebra's QR with sign correction.
pub fn haar(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `A = Q·diag(d)·Qᵀ` with its exact decomposition attached.
pub fn spectral(rng: &mut ChaCha8Rng, d: &[f64]) -> SpectralMatrix {
    let n = d.len();
    let q = haar(rng, n);
    let a = &q * DMatrix::from_diagonal(&DVector::from_column_slice(d)) * q.transpose();
    let a = SymmetricMatrix::new(a).unwrap();
    SpectralMatrix::from_parts(a, EigenDecomposition::new(d.to_vec(), q).unwrap()).unwrap()
}

/// Sorted spectrum with entries at least `gap` apart.
pub fn separated_spectrum(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut x = rng.random_range(-5.0..5.0);
    for _ in 0..n {
        v.push(x);
        x += gap + rng.random_range(0.0..1.0);
    }
    v
}

/// `orth([cos φ·X + sin φ·W | R])` with `W ⊥ X` and `R` unconstrained.
pub fn tilted_subspace(rng: &mut ChaCha8Rng, x: &DMatrix<f64>, phi: f64, s: usize) -> OrthonormalBasis {
    let n = x.nrows();
    let m = x.ncols();
    let g = gaussian(rng, n, m);
    let comp = &g - x * (x.transpose() * &g);
    let comp = qr_orthonormalize(&comp).unwrap().into_columns();
    let extra = gaussian(rng, n, s - m);
    let mut cols = DMatrix::zeros(n, s);
    for j in 0..m {
        cols.set_column(j, &(x.column(j) * phi.cos() + comp.column(j) * phi.sin()));
    }
    for j in m..s {
        cols.set_column(j, &extra.column(j - m));
    }
    qr_orthonormalize(&cols).unwrap()
}

pub fn midpoint_shift(values: &[f64], i: usize) -> f64 {
    0.5 * (values[i] + values[i + 1])
}
