//! Evaluators for the a priori angle bounds.
//!
//! Each evaluator measures the left-hand side from an actual extraction
//! and computes the right-hand side from its ingredients, returning both in
//! a [`BoundReport`]. All right-hand sides share the shape
//! `κ·sqrt(1 + γ²/δ²)·sin∠(x, K)`.

mod harmonic;
mod lemma;
mod standard;

pub use harmonic::{b_inverse_norm, deflated_harmonic_bound, eigenspace_harmonic_bound, harmonic_bound, t_harmonic_bound};
pub use lemma::{lemma_sin_bounds, lemma_tightness_profile, subspace_sin_transport, LemmaProfile, TransportDirection};
pub use standard::{saad_bound, separation_delta_hermitian, stewart_frobenius_bound};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::Error;
use crate::linalg::{frobenius_norm, spectral_norm};
use crate::tol::BOUND_SLACK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    LemmaLower,
    LemmaUpper,
    TransportForward,
    TransportBackward,
    Saad,
    Stewart,
    Harmonic,
    Deflated,
    Eigenspace,
    THarmonic,
}

impl BoundId {
    pub fn tag(self) -> &'static str {
        match self {
            BoundId::LemmaLower => "lemma_lower",
            BoundId::LemmaUpper => "lemma_upper",
            BoundId::TransportForward => "transport_forward",
            BoundId::TransportBackward => "transport_backward",
            BoundId::Saad => "saad",
            BoundId::Stewart => "stewart",
            BoundId::Harmonic => "harmonic",
            BoundId::Deflated => "deflated",
            BoundId::Eigenspace => "eigenspace",
            BoundId::THarmonic => "tharmonic",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        [
            BoundId::LemmaLower,
            BoundId::LemmaUpper,
            BoundId::TransportForward,
            BoundId::TransportBackward,
            BoundId::Saad,
            BoundId::Stewart,
            BoundId::Harmonic,
            BoundId::Deflated,
            BoundId::Eigenspace,
            BoundId::THarmonic,
        ]
        .into_iter()
        .find(|b| b.tag() == s)
        .ok_or_else(|| Error::Parse(format!("unknown bound id {s:?}")))
    }
}

/// One evaluated bound instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub lhs: f64,
    pub gamma: f64,
    /// `INF` when the separating set is empty.
    pub delta: f64,
    pub kappa: Option<f64>,
    pub sin_angle_to_k: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(bound_id: BoundId, lhs: f64, gamma: f64, delta: f64, kappa: Option<f64>, sin_angle_to_k: f64) -> Self {
        let rhs = rhs_from_parts(gamma, delta, kappa, sin_angle_to_k);
        let slack = rhs - lhs;
        let satisfied = rhs == f64::INFINITY || slack >= -BOUND_SLACK * rhs.max(1.0);
        Self { bound_id, lhs, gamma, delta, kappa, sin_angle_to_k, rhs, slack, satisfied }
    }

    /// `lhs / rhs`, or 0 when `rhs = 0`.
    pub fn tightness(&self) -> f64 {
        if self.rhs == 0.0 || !self.rhs.is_finite() {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// `κ·sqrt(1 + γ²/δ²)·sin`, with κ = 1 when absent and `γ²/δ² = 0` when
/// `δ = INF` or `γ = 0`. A zero separation with positive coupling makes the
/// bound vacuous (`INF`).
pub fn rhs_from_parts(gamma: f64, delta: f64, kappa: Option<f64>, sin_angle_to_k: f64) -> f64 {
    let ratio = if delta.is_infinite() || gamma == 0.0 {
        0.0
    } else if delta == 0.0 {
        return f64::INFINITY;
    } else {
        (gamma / delta).powi(2)
    };
    kappa.unwrap_or(1.0) * (1.0 + ratio).sqrt() * sin_angle_to_k
}

/// `‖Qᵀ M (I − QQᵀ)‖` from `Q` (orthonormal) and `MQ` for symmetric `M`.
/// This `s×n` block has the same singular values as `P_Q M (I − P_Q)`.
pub(crate) fn coupling_norm(q: &DMatrix<f64>, mq: &DMatrix<f64>, frobenius: bool) -> f64 {
    let block = mq.transpose() - (q.transpose() * mq) * q.transpose();
    if frobenius {
        frobenius_norm(&block)
    } else {
        spectral_norm(&block)
    }
}

/// Harmonic separation `min |(θ_j − λ) / ((λ − σ)(θ_j − σ))|` over the given
/// values; an infinite θ contributes its limit `1/|λ − σ|`.
pub(crate) fn harmonic_delta(values: impl IntoIterator<Item = f64>, lambda: f64, sigma: f64) -> f64 {
    values
        .into_iter()
        .map(|theta| {
            if theta.is_finite() {
                ((theta - lambda) / ((lambda - sigma) * (theta - sigma))).abs()
            } else {
                1.0 / (lambda - sigma).abs()
            }
        })
        .fold(f64::INFINITY, f64::min)
}
