//! Seeded generators for test matrices, subspaces and full trial instances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{ExperimentConfig, ShiftRule, Spectrum};
use crate::error::HarnessError;
use ritzbound_core::linalg::{householder_qr, qr_orthonormalize, sin_angle_subspaces};
use ritzbound_core::tol::CLUSTER_GAP;
use ritzbound_core::{EigenDecomposition, OrthonormalBasis, SpectralMatrix, SymmetricMatrix};

/// Golden-ratio increment separating per-trial seeds.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of trial `index`: `base + index·0x9E3779B97F4A7C15 (mod 2⁶⁴)`.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(SEED_STRIDE))
}

/// ChaCha8 stream for a seed; all generators draw from this.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix: the Q factor (positive-diagonal R)
/// of a standard normal matrix.
pub fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>, HarnessError> {
    Ok(householder_qr(&gaussian(rng, n, n))?.0)
}

/// Ascending eigenvalues realizing `spec` at order `n`.
pub fn gen_spectrum(spec: &Spectrum, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, HarnessError> {
    spec.validate(Some(n))?;
    let mut values = match spec {
        Spectrum::Uniform { a, b } => (0..n).map(|_| rng.random_range(*a..=*b)).collect(),
        Spectrum::Explicit(v) => v.clone(),
        Spectrum::Clustered { centers, widths, counts } => {
            let mut v = Vec::with_capacity(n);
            for ((c, w), &m) in centers.iter().zip(widths).zip(counts) {
                for _ in 0..m {
                    v.push(if *w == 0.0 { *c } else { c + w * (rng.random::<f64>() - 0.5) });
                }
            }
            v
        }
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `A = Q·diag(values)·Qᵀ` with Haar `Q`; the attached decomposition is the
/// construction itself, not a recomputation.
pub fn gen_matrix_from_values(values: &[f64], rng: &mut ChaCha8Rng) -> Result<SpectralMatrix, HarnessError> {
    let n = values.len();
    let q = haar_orthogonal(n, rng)?;
    let mut qd = q.clone();
    for (j, &v) in values.iter().enumerate() {
        qd.column_mut(j).scale_mut(v);
    }
    let a = SymmetricMatrix::new(&qd * q.transpose())?;
    let eig = EigenDecomposition::new(values.to_vec(), q)?;
    Ok(SpectralMatrix::from_parts(a, eig)?)
}

/// Random symmetric matrix with the prescribed spectrum.
pub fn gen_matrix(spec: &Spectrum, n: usize, seed: u64) -> Result<SpectralMatrix, HarnessError> {
    let mut rng = rng_from_seed(seed);
    let values = gen_spectrum(spec, n, &mut rng)?;
    gen_matrix_from_values(&values, &mut rng)
}

/// `orth([cos φ·X + sin φ·W | R])` inside `range(span)` (or the whole space),
/// with `W` a random orthonormal set orthogonal to `X` and `R` random.
///
/// Returns the basis and the realized `sin∠(X, K)`.
pub fn tilted_subspace(
    x: &OrthonormalBasis,
    span: Option<&DMatrix<f64>>,
    phi: f64,
    s: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(OrthonormalBasis, f64), HarnessError> {
    let n = x.ambient_dim();
    let m = x.dim();
    let room = span.map_or(n, |b| b.ncols());
    if s < m || s > room || 2 * m > room {
        return Err(HarnessError::Input(format!("need m <= s <= {room} and 2m <= {room}, got m = {m}, s = {s}")));
    }
    let draw = |rng: &mut ChaCha8Rng, cols: usize| match span {
        Some(b) => b * gaussian(rng, b.ncols(), cols),
        None => gaussian(rng, n, cols),
    };
    let xc = x.columns();
    let g = draw(rng, m);
    let w = qr_orthonormalize(&(&g - xc * (xc.transpose() * &g)))?.into_columns();
    let extra = draw(rng, s - m);
    let (c, sn) = (phi.cos(), phi.sin());
    let mut cols = DMatrix::zeros(n, s);
    for j in 0..m {
        cols.set_column(j, &(xc.column(j) * c + w.column(j) * sn));
    }
    for j in m..s {
        cols.set_column(j, &extra.column(j - m));
    }
    let k = qr_orthonormalize(&cols)?;
    let realized = sin_angle_subspaces(x, &k)?;
    Ok((k, realized))
}

/// Eigenvector basis for the given indices of a decomposition.
pub fn eigen_columns(a: &SpectralMatrix, idx: &[usize]) -> Result<OrthonormalBasis, HarnessError> {
    let cols = DMatrix::from_fn(a.order(), idx.len(), |i, j| a.eig().vectors()[(i, idx[j])]);
    Ok(OrthonormalBasis::new(cols)?)
}

/// Subspace `K` tilted by `φ` away from the eigenvectors `targets`.
pub fn gen_subspace(
    a: &SpectralMatrix,
    targets: &[usize],
    phi: f64,
    s: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(OrthonormalBasis, f64), HarnessError> {
    if targets.is_empty() || targets.iter().any(|&t| t >= a.order()) {
        return Err(HarnessError::Input("target indices must be nonempty and in range".into()));
    }
    tilted_subspace(&eigen_columns(a, targets)?, None, phi, s, rng)
}

/// Everything a trial needs: the matrix, shift, target and subspace.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub a: SpectralMatrix,
    pub n: usize,
    pub s: usize,
    pub sigma: f64,
    pub phi: f64,
    /// Sorted eigenvalue index of the target eigenpair.
    pub target: usize,
    /// Indices of the target eigenvalue's cluster (its eigenspace).
    pub cluster: Vec<usize>,
    pub k: OrthonormalBasis,
    pub realized_sin: f64,
    /// Stream state after the instance was drawn; bound rows fork from it.
    pub rng: ChaCha8Rng,
}

/// Representative of each cluster of equal eigenvalues, as `(first, last)` indices.
fn distinct_groups(values: &[f64]) -> Vec<(usize, usize)> {
    let tol = CLUSTER_GAP * values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for (j, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (v - values[g.1]).abs() <= tol => g.1 = j,
            _ => groups.push((j, j)),
        }
    }
    groups
}

fn choose_shift(
    rule: ShiftRule,
    values: &[f64],
    anchor: Option<usize>,
    min_gap: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, HarnessError> {
    let groups = distinct_groups(values);
    let group_of = |idx: usize| groups.iter().position(|g| g.0 <= idx && idx <= g.1).unwrap_or(0);
    let midpoint = |i: usize| 0.5 * (values[groups[i].1] + values[groups[i + 1].0]);
    let half_width = |i: usize| 0.5 * (values[groups[i + 1].0] - values[groups[i].1]);
    match rule {
        ShiftRule::Explicit(sigma) => Ok(sigma),
        ShiftRule::Midpoint(Some(i)) => {
            if i + 1 >= groups.len() {
                return Err(HarnessError::Input(format!("midpoint index {i} needs {} distinct eigenvalues", i + 2)));
            }
            if half_width(i) < min_gap {
                return Err(HarnessError::Input(format!("midpoint {i} lies within {min_gap} of the spectrum")));
            }
            Ok(midpoint(i))
        }
        ShiftRule::Midpoint(None) => {
            let candidates: Vec<usize> = match anchor {
                Some(t) => {
                    let g = group_of(t);
                    [g.checked_sub(1), (g + 1 < groups.len()).then_some(g)].into_iter().flatten().collect()
                }
                None => (0..groups.len().saturating_sub(1)).collect(),
            };
            let eligible: Vec<usize> = candidates.into_iter().filter(|&i| half_width(i) >= min_gap).collect();
            if eligible.is_empty() {
                return Err(HarnessError::Input(format!("no eigenvalue gap wider than {}", 2.0 * min_gap)));
            }
            Ok(midpoint(eligible[rng.random_range(0..eligible.len())]))
        }
        ShiftRule::NearEigenvalue(i, gap) => {
            let g = match (i, anchor) {
                (Some(i), _) if i < groups.len() => i,
                (Some(i), _) => return Err(HarnessError::Input(format!("eigenvalue index {i} out of range"))),
                (None, Some(t)) => group_of(t),
                (None, None) => rng.random_range(0..groups.len()),
            };
            Ok(values[groups[g].0] + gap)
        }
    }
}

/// Draws the trial instance for `trial` under `cfg`.
pub fn build_instance(cfg: &ExperimentConfig, trial: usize) -> Result<Instance, HarnessError> {
    let seed = trial_seed(cfg.seed, trial);
    let mut rng = rng_from_seed(seed);
    let n = match cfg.n_max {
        Some(hi) => rng.random_range(cfg.n..=hi),
        None => cfg.n,
    };
    let s = match cfg.s_max {
        Some(hi) => rng.random_range(cfg.s..=hi.min(n)),
        None => cfg.s,
    };
    let m = cfg.multiplicity;
    let mut values = gen_spectrum(&cfg.spectrum, n, &mut rng)?;

    let mut anchor = cfg.target;
    if m > 1 {
        let j = cfg.target.unwrap_or_else(|| rng.random_range(0..=n - m));
        let base = values[j];
        for l in 0..m {
            values[j + l] = base + cfg.cluster_width * l as f64 / (m - 1) as f64;
        }
        values.sort_by(f64::total_cmp);
        anchor = values.iter().position(|&v| v == base);
    }

    let mut sigma = choose_shift(cfg.shift, &values, anchor, cfg.min_shift_gap, &mut rng)?;
    let a = gen_matrix_from_values(&values, &mut rng)?;

    let target = match anchor {
        Some(t) => t,
        None => {
            let d = |j: usize| (values[j] - sigma).abs();
            (0..n).fold(0, |best, j| if d(j) < d(best) { j } else { best })
        }
    };
    if cfg.singular_trials.contains(&trial) {
        sigma = values[target];
    }
    let cluster = a.eig().cluster_indices(values[target]);
    if cluster.len() > s || 2 * cluster.len() > n {
        return Err(HarnessError::Input(format!("target eigenspace of dimension {} does not fit s = {s}, n = {n}", cluster.len())));
    }
    let phi = match cfg.angle_min {
        Some(lo) => (rng.random_range(lo.ln()..=cfg.angle_phi.ln())).exp(),
        None => cfg.angle_phi,
    };
    let (k, realized_sin) = gen_subspace(&a, &cluster, phi, s, &mut rng)?;
    Ok(Instance { seed, a, n, s, sigma, phi, target, cluster, k, realized_sin, rng })
}

/// Random unit vector making angle `φ` with the unit vector `x`.
pub fn tilted_vector(x: &DVector<f64>, phi: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let g = DVector::from_fn(x.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let w = &g - x * x.dot(&g);
    let w = w.normalize();
    x * phi.cos() + w * phi.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ritzbound_core::linalg::frobenius_norm;

    #[test]
    fn explicit_spectrum_is_exact() {
        let a = gen_matrix(&"explicit:1,2,4".parse().unwrap(), 3, 7).unwrap();
        assert_eq!(a.eigenvalues(), &[1.0, 2.0, 4.0]);
        let m = a.matrix().matrix();
        assert_eq!(frobenius_norm(&(m - m.transpose())), 0.0);
    }

    #[test]
    fn scalar_cluster_gives_scaled_identity() {
        let a = gen_matrix(&"clustered:2/0/3".parse().unwrap(), 3, 1).unwrap();
        assert_eq!(a.eigenvalues(), &[2.0, 2.0, 2.0]);
        let diff = a.matrix().matrix() - DMatrix::identity(3, 3) * 2.0;
        assert!(frobenius_norm(&diff) < 1e-14);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec: Spectrum = "uniform:-3,3".parse().unwrap();
        let a = gen_matrix(&spec, 8, 42).unwrap();
        let b = gen_matrix(&spec, 8, 42).unwrap();
        let c = gen_matrix(&spec, 8, 43).unwrap();
        assert_eq!(a.matrix().matrix(), b.matrix().matrix());
        assert_ne!(a.matrix().matrix(), c.matrix().matrix());
    }

    #[test]
    fn subspace_angle_examples() {
        let a = gen_matrix(&"explicit:1,2,3,4,5".parse().unwrap(), 5, 3).unwrap();
        let mut rng = rng_from_seed(5);
        let (_, r) = gen_subspace(&a, &[1], std::f64::consts::FRAC_PI_4, 1, &mut rng).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let (_, r) = gen_subspace(&a, &[1, 2], std::f64::consts::FRAC_PI_2, 2, &mut rng).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let (_, r) = gen_subspace(&a, &[0], 1e-9, 3, &mut rng).unwrap();
        assert!(r <= 1e-9 + 1e-12);
        for phi in [0.1, 0.5, 1.2] {
            let (_, r) = gen_subspace(&a, &[2], phi, 3, &mut rng).unwrap();
            assert!(r <= phi.sin() + 1e-12);
        }
        assert!(gen_subspace(&a, &[0, 1, 2], 0.3, 3, &mut rng).is_err());
    }

    #[test]
    fn shift_rules_avoid_the_spectrum() {
        let values = [1.0, 2.0, 2.0, 4.0];
        let mut rng = rng_from_seed(0);
        assert_eq!(choose_shift(ShiftRule::Midpoint(Some(0)), &values, None, 1e-3, &mut rng).unwrap(), 1.5);
        assert_eq!(choose_shift(ShiftRule::Midpoint(Some(1)), &values, None, 1e-3, &mut rng).unwrap(), 3.0);
        assert!(choose_shift(ShiftRule::Midpoint(Some(2)), &values, None, 1e-3, &mut rng).is_err());
        assert_eq!(choose_shift(ShiftRule::NearEigenvalue(Some(2), 1e-3), &values, None, 0.0, &mut rng).unwrap(), 4.001);
        let s = choose_shift(ShiftRule::Midpoint(None), &values, Some(1), 1e-3, &mut rng).unwrap();
        assert!(s == 1.5 || s == 3.0);
    }

    #[test]
    fn instances_follow_the_config() {
        let cfg = ExperimentConfig { n: 10, s: 4, multiplicity: 2, ..Default::default() };
        for trial in 0..20 {
            let inst = build_instance(&cfg, trial).unwrap();
            assert_eq!(inst.cluster.len(), 2);
            assert!(inst.a.shift_gap(inst.sigma) >= 1e-3);
            assert!(inst.realized_sin <= inst.phi.sin() + 1e-12);
        }
    }
}
