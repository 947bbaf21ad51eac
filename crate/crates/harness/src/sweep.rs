//! Trial execution, parameter sweeps and preconditioner comparison.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{BoundSel, ExperimentConfig, PrecondChoice, ShiftRule};
use crate::error::HarnessError;
use crate::generate::{build_instance, eigen_columns, gaussian, gen_subspace, rng_from_seed, tilted_subspace, tilted_vector, trial_seed, Instance};
use crate::record::TrialRecord;
use ritzbound_core::bounds::{
    deflated_harmonic_bound, eigenspace_harmonic_bound, harmonic_bound, lemma_sin_bounds, saad_bound, stewart_frobenius_bound,
    subspace_sin_transport, t_harmonic_bound, BoundReport, TransportDirection,
};
use ritzbound_core::extraction::commutation_residual;
use ritzbound_core::linalg::frobenius_norm;
use ritzbound_core::precond::PreconditionerSpec;
use ritzbound_core::tol::TOL_COMMUTE;
use ritzbound_core::{SpectralMatrix, SymmetricMatrix};

/// Builds the preconditioner named by `choice` for `(A, σ)`.
pub fn build_preconditioner(choice: &PrecondChoice, a: &SpectralMatrix, sigma: f64, rng: &mut ChaCha8Rng) -> Result<PreconditionerSpec, HarnessError> {
    Ok(match choice {
        PrecondChoice::Identity => PreconditionerSpec::identity(a.order()),
        PrecondChoice::AbsValueInverse => PreconditionerSpec::abs_value_inverse(a, sigma)?,
        PrecondChoice::ShiftInverseSquared => PreconditionerSpec::shift_inverse_squared(a, sigma)?,
        PrecondChoice::Polynomial(c) => PreconditionerSpec::polynomial_commuting(a, c)?,
        PrecondChoice::Perturbed(eps) => {
            let base = PreconditionerSpec::abs_value_inverse(a, sigma)?;
            let n = a.order();
            let g = gaussian(rng, n, n);
            let e = (&g + g.transpose()) * 0.5;
            let scale = eps * base.realized().frobenius_norm() / frobenius_norm(&e);
            let t: DMatrix<f64> = base.realized().matrix() + e * scale;
            PreconditionerSpec::general(SymmetricMatrix::new(t)?)?
        }
    })
}

/// Window of `p` consecutive eigen indices containing the cluster, for the
/// deflated bound's invariant subspace.
fn deflation_window(inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = inst.n;
    let m = inst.cluster.len();
    let p = (inst.s.max(2 * m) + 2).min(n);
    let (c0, c1) = (inst.cluster[0], *inst.cluster.last().unwrap());
    let lo_min = (c1 + 1).saturating_sub(p);
    let lo_max = c0.min(n - p);
    let lo = rng.random_range(lo_min..=lo_max);
    (lo..lo + p).collect()
}

fn evaluate(sel: BoundSel, inst: &Instance, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Vec<(BoundReport, bool)>, HarnessError> {
    let a = &inst.a;
    let sigma = inst.sigma;
    let lambda = a.eigenvalues()[inst.target];
    let one = |r: BoundReport| Ok(vec![(r, true)]);
    match sel {
        BoundSel::Lemma => {
            let y = tilted_vector(&a.eigenvector(inst.target), inst.phi, rng);
            let (_, lo, up) = lemma_sin_bounds(a, inst.target, &y)?;
            Ok(vec![(lo, true), (up, true)])
        }
        BoundSel::Transport => {
            let f = subspace_sin_transport(a, None, inst.target, &inst.k, TransportDirection::Forward)?;
            let b = subspace_sin_transport(a, None, inst.target, &inst.k, TransportDirection::Backward)?;
            Ok(vec![(f, true), (b, true)])
        }
        BoundSel::Saad => one(saad_bound(a, &inst.k, inst.target)?),
        BoundSel::Stewart => one(stewart_frobenius_bound(a, &inst.k, lambda, None)?),
        BoundSel::Harmonic => one(harmonic_bound(a, &inst.k, sigma, inst.target)?),
        BoundSel::Eigenspace => one(eigenspace_harmonic_bound(a, &inst.k, sigma, lambda, None)?),
        BoundSel::Deflated => {
            let window = deflation_window(inst, rng);
            let x = eigen_columns(a, &window)?;
            let target = eigen_columns(a, &inst.cluster)?;
            let (k, _) = tilted_subspace(&target, Some(x.columns()), inst.phi, inst.s.min(window.len()), rng)?;
            one(deflated_harmonic_bound(a, &x, &k, sigma, inst.target)?)
        }
        BoundSel::THarmonic => {
            let spec = build_preconditioner(&cfg.precond, a, sigma, rng)?;
            let commuting = commutation_residual(a.matrix(), spec.realized()) <= TOL_COMMUTE;
            let r = t_harmonic_bound(a, &inst.k, sigma, &spec, inst.target, cfg.force)?;
            Ok(vec![(r, commuting)])
        }
    }
}

/// All rows of one trial. Each bound family draws its extra randomness from
/// its own ChaCha stream so rows do not depend on which families run.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Vec<TrialRecord> {
    let inst = match build_instance(cfg, trial) {
        Ok(inst) => inst,
        Err(e) => {
            let seed = trial_seed(cfg.seed, trial);
            return cfg
                .bounds
                .iter()
                .flat_map(|b| b.ids())
                .map(|id| TrialRecord::failed(trial, seed, id.tag(), cfg.n, cfg.s, f64::NAN, e.to_string()))
                .collect();
        }
    };
    let lambda = inst.a.eigenvalues()[inst.target];
    let mut rows = Vec::new();
    for &sel in &cfg.bounds {
        let mut rng = inst.rng.clone();
        rng.set_stream(1 + sel as u64);
        let start = Instant::now();
        let result = evaluate(sel, &inst, cfg, &mut rng);
        let ms = if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        match result {
            Ok(reports) => {
                for (r, asserted) in reports {
                    let mut rec = TrialRecord::from_report(trial, inst.seed, inst.n, inst.s, inst.sigma, lambda, inst.realized_sin, &r);
                    rec.asserted = asserted;
                    rec.wall_time_ms = ms;
                    rows.push(rec);
                }
            }
            Err(e) => {
                for id in sel.ids() {
                    let mut rec = TrialRecord::failed(trial, inst.seed, id.tag(), inst.n, inst.s, inst.sigma, e.to_string());
                    rec.target_lambda = lambda;
                    rec.realized_sin = inst.realized_sin;
                    rec.wall_time_ms = ms;
                    rows.push(rec);
                }
            }
        }
    }
    rows
}

/// Runs every trial (in parallel) and returns rows ordered by trial index.
pub fn run_sweep(cfg: &ExperimentConfig) -> Vec<TrialRecord> {
    let per_trial: Vec<Vec<TrialRecord>> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    per_trial.into_iter().flatten().collect()
}

/// Outcome classes that map to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outcome {
    pub rows: usize,
    pub violations: usize,
    pub errors: usize,
    pub unasserted: usize,
}

impl Outcome {
    pub fn of(records: &[TrialRecord]) -> Self {
        let mut o = Outcome { rows: records.len(), ..Default::default() };
        for r in records {
            if r.error.is_some() {
                o.errors += 1;
            } else if !r.asserted {
                o.unasserted += 1;
            } else if !r.satisfied {
                o.violations += 1;
            }
        }
        o
    }

    /// 0 when everything held, 1 on a violated bound, 3 on failed rows.
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            1
        } else if self.errors > 0 {
            3
        } else {
            0
        }
    }
}

/// Parameter driven by `sweep --vary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    /// Distance of σ from a random eigenvalue (`near` shift rule).
    ShiftGap,
    /// Tilt angle of `K`.
    Angle,
    /// Spread of the forced multiple eigenvalue.
    ClusterWidth,
}

impl std::str::FromStr for Vary {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "shift-gap" => Ok(Vary::ShiftGap),
            "angle" => Ok(Vary::Angle),
            "cluster-width" => Ok(Vary::ClusterWidth),
            other => Err(HarnessError::Input(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// `a:b:steps`, spaced logarithmically when `log` (requires `0 < a`) and linearly otherwise.
pub fn parse_range(s: &str, log: bool) -> Result<Vec<f64>, HarnessError> {
    let bad = || HarnessError::Input(format!("range {s:?} is not a:b:steps"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, steps] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps == 0 || !a.is_finite() || !b.is_finite() || (log && !(a > 0.0 && b > 0.0)) {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            if log {
                (a.ln() + t * (b.ln() - a.ln())).exp()
            } else {
                a + t * (b - a)
            }
        })
        .collect())
}

/// Config for one sweep bucket.
pub fn bucket_config(base: &ExperimentConfig, vary: Vary, value: f64) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = base.clone();
    match vary {
        Vary::ShiftGap => cfg.shift = ShiftRule::NearEigenvalue(None, value),
        Vary::Angle => {
            cfg.angle_phi = value;
            cfg.angle_min = None;
        }
        Vary::ClusterWidth => {
            cfg.multiplicity = cfg.multiplicity.max(2);
            cfg.cluster_width = value;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Rows of every bucket, each tagged with its parameter value.
pub fn run_vary(base: &ExperimentConfig, vary: Vary, values: &[f64]) -> Result<Vec<(f64, TrialRecord)>, HarnessError> {
    let mut out = Vec::new();
    for &v in values {
        let cfg = bucket_config(base, vary, v)?;
        out.extend(run_sweep(&cfg).into_iter().map(|r| (v, r)));
    }
    Ok(out)
}

/// Mean tightness and satisfied count per `(bucket, bound_id)`, in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketSummary {
    pub bucket: f64,
    pub bound_id: String,
    pub rows: usize,
    pub satisfied: usize,
    pub mean_tightness: f64,
    pub mean_kappa: f64,
}

pub fn summarize(rows: &[(f64, TrialRecord)]) -> Vec<BucketSummary> {
    let mut out: Vec<BucketSummary> = Vec::new();
    let mut sums: Vec<(f64, usize, f64, usize)> = Vec::new();
    for (bucket, r) in rows {
        let pos = out.iter().position(|s| s.bucket == *bucket && s.bound_id == r.bound_id).unwrap_or_else(|| {
            out.push(BucketSummary { bucket: *bucket, bound_id: r.bound_id.clone(), rows: 0, satisfied: 0, mean_tightness: 0.0, mean_kappa: 0.0 });
            sums.push((0.0, 0, 0.0, 0));
            out.len() - 1
        });
        out[pos].rows += 1;
        if r.error.is_none() && r.satisfied {
            out[pos].satisfied += 1;
            if r.tightness.is_finite() {
                sums[pos].0 += r.tightness;
                sums[pos].1 += 1;
            }
            if let Some(k) = r.kappa.filter(|k| k.is_finite()) {
                sums[pos].2 += k;
                sums[pos].3 += 1;
            }
        }
    }
    for (s, (t, tc, k, kc)) in out.iter_mut().zip(sums) {
        s.mean_tightness = if tc > 0 { t / tc as f64 } else { f64::NAN };
        s.mean_kappa = if kc > 0 { k / kc as f64 } else { f64::NAN };
    }
    out
}

/// One row of `compare-precond`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecondRow {
    pub trial: usize,
    pub seed: u64,
    pub precond: String,
    pub kappa: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub tightness: f64,
    pub satisfied: bool,
    pub error: Option<String>,
}

pub const PRECOND_HEADER: [&str; 9] = ["trial", "seed", "precond", "kappa", "lhs", "rhs", "tightness", "satisfied", "error"];

impl PrecondRow {
    pub fn fields(&self) -> Vec<String> {
        use crate::record::fmt_f64;
        vec![
            self.trial.to_string(),
            self.seed.to_string(),
            self.precond.clone(),
            fmt_f64(self.kappa),
            fmt_f64(self.lhs),
            fmt_f64(self.rhs),
            fmt_f64(self.tightness),
            self.satisfied.to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// T-harmonic bound with identity, `|A − σI|⁻¹` and `(A − σI)⁻²` on random
/// subspaces tilted toward the eigenvector nearest σ.
pub fn compare_preconditioners(a: &SpectralMatrix, sigma: f64, trials: usize, s: usize, phi: f64, seed: u64) -> Result<Vec<PrecondRow>, HarnessError> {
    a.check_shift(sigma)?;
    let n = a.order();
    let target = (0..n).fold(0, |best, j| if (a.eigenvalues()[j] - sigma).abs() < (a.eigenvalues()[best] - sigma).abs() { j } else { best });
    let cluster = a.eig().cluster_indices(a.eigenvalues()[target]);
    let choices = [PrecondChoice::Identity, PrecondChoice::AbsValueInverse, PrecondChoice::ShiftInverseSquared];
    let per_trial: Vec<Vec<PrecondRow>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let tseed = trial_seed(seed, trial);
            let mut rng = rng_from_seed(tseed);
            let k = gen_subspace(a, &cluster, phi, s, &mut rng);
            choices
                .iter()
                .map(|c| {
                    let res = k.as_ref().map_err(|e| e.to_string()).and_then(|(k, _)| {
                        let spec = build_preconditioner(c, a, sigma, &mut rng).map_err(|e| e.to_string())?;
                        t_harmonic_bound(a, k, sigma, &spec, target, false).map_err(|e| e.to_string())
                    });
                    match res {
                        Ok(r) => PrecondRow {
                            trial,
                            seed: tseed,
                            precond: c.to_string(),
                            kappa: r.kappa.unwrap_or(1.0),
                            lhs: r.lhs,
                            rhs: r.rhs,
                            tightness: r.tightness(),
                            satisfied: r.satisfied,
                            error: None,
                        },
                        Err(e) => PrecondRow {
                            trial,
                            seed: tseed,
                            precond: c.to_string(),
                            kappa: f64::NAN,
                            lhs: f64::NAN,
                            rhs: f64::NAN,
                            tightness: f64::NAN,
                            satisfied: false,
                            error: Some(e),
                        },
                    }
                })
                .collect()
        })
        .collect();
    Ok(per_trial.into_iter().flatten().collect())
}
