//! Experiment configuration and its textual forms.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::HarnessError;
use ritzbound_core::bounds::BoundId;

/// Prescribed spectrum of a generated matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `n` values uniform on `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// `counts[i]` values uniform on `centers[i] ± widths[i]/2`.
    Clustered { centers: Vec<f64>, widths: Vec<f64>, counts: Vec<usize> },
    Explicit(Vec<f64>),
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, HarnessError> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| HarnessError::Input(format!("bad {what} entry {t:?}"))))
        .collect()
}

impl FromStr for Spectrum {
    type Err = HarnessError;

    /// `uniform:a,b`, `clustered:c/w/m;c/w/m;...` or `explicit:v1,v2,...`.
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let (kind, body) = s.split_once(':').ok_or_else(|| HarnessError::Input(format!("spectrum {s:?} lacks a kind prefix")))?;
        match kind.trim() {
            "uniform" => match parse_list::<f64>(body, "uniform")?.as_slice() {
                &[a, b] if a.is_finite() && b.is_finite() && a < b => Ok(Spectrum::Uniform { a, b }),
                _ => Err(HarnessError::Input(format!("uniform spectrum needs finite a < b, got {body:?}"))),
            },
            "clustered" => {
                let (mut centers, mut widths, mut counts) = (Vec::new(), Vec::new(), Vec::new());
                for group in body.split(';').filter(|g| !g.trim().is_empty()) {
                    let parts: Vec<&str> = group.split('/').collect();
                    let [c, w, m] = parts.as_slice() else {
                        return Err(HarnessError::Input(format!("cluster {group:?} is not center/width/count")));
                    };
                    let bad = |t: &str| HarnessError::Input(format!("bad cluster field {t:?}"));
                    centers.push(c.trim().parse::<f64>().map_err(|_| bad(c))?);
                    widths.push(w.trim().parse::<f64>().map_err(|_| bad(w))?);
                    counts.push(m.trim().parse::<usize>().map_err(|_| bad(m))?);
                }
                let spec = Spectrum::Clustered { centers, widths, counts };
                spec.validate(None)?;
                Ok(spec)
            }
            "explicit" => {
                let v = parse_list::<f64>(body, "explicit")?;
                let spec = Spectrum::Explicit(v);
                spec.validate(None)?;
                Ok(spec)
            }
            other => Err(HarnessError::Input(format!("unknown spectrum kind {other:?}"))),
        }
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Spectrum::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Spectrum::Explicit(v) => write!(f, "explicit:{}", join(v)),
            Spectrum::Clustered { centers, widths, counts } => {
                let groups: Vec<String> = (0..centers.len()).map(|i| format!("{}/{}/{}", centers[i], widths[i], counts[i])).collect();
                write!(f, "clustered:{}", groups.join(";"))
            }
        }
    }
}

impl Spectrum {
    /// Number of eigenvalues the spec fixes, if any.
    pub fn fixed_len(&self) -> Option<usize> {
        match self {
            Spectrum::Uniform { .. } => None,
            Spectrum::Clustered { counts, .. } => Some(counts.iter().sum()),
            Spectrum::Explicit(v) => Some(v.len()),
        }
    }

    pub fn validate(&self, n: Option<usize>) -> Result<(), HarnessError> {
        match self {
            Spectrum::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(HarnessError::Input("uniform spectrum needs finite a < b".into()));
                }
            }
            Spectrum::Clustered { centers, widths, counts } => {
                if centers.is_empty() || centers.len() != widths.len() || centers.len() != counts.len() {
                    return Err(HarnessError::Input("clustered spectrum needs matching center/width/count lists".into()));
                }
                if centers.iter().chain(widths).any(|v| !v.is_finite()) || widths.iter().any(|w| *w < 0.0) {
                    return Err(HarnessError::Input("cluster centers must be finite and widths nonnegative".into()));
                }
            }
            Spectrum::Explicit(v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(HarnessError::Input("explicit spectrum needs finite values".into()));
                }
            }
        }
        match (n, self.fixed_len()) {
            (Some(n), Some(m)) if n != m => Err(HarnessError::Input(format!("spectrum has {m} values but n = {n}"))),
            (_, Some(0)) => Err(HarnessError::Input("spectrum is empty".into())),
            _ => Ok(()),
        }
    }
}

/// Where the shift goes. Indices refer to the sorted distinct eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftRule {
    /// Midpoint of distinct values `i` and `i+1`; random `i` when absent.
    Midpoint(Option<usize>),
    Explicit(f64),
    /// `λ_i + gap`; random `i` when absent.
    NearEigenvalue(Option<usize>, f64),
}

impl FromStr for ShiftRule {
    type Err = HarnessError;

    /// `midpoint`, `midpoint:i`, `explicit:σ`, `near:gap` or `near:i,gap`.
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let bad = || HarnessError::Input(format!("bad shift rule {s:?}"));
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let body = body.trim();
        match kind.trim() {
            "midpoint" if body.is_empty() => Ok(ShiftRule::Midpoint(None)),
            "midpoint" => Ok(ShiftRule::Midpoint(Some(body.parse().map_err(|_| bad())?))),
            "explicit" => {
                let sigma: f64 = body.parse().map_err(|_| bad())?;
                if !sigma.is_finite() {
                    return Err(bad());
                }
                Ok(ShiftRule::Explicit(sigma))
            }
            "near" => {
                let (index, gap) = match body.split_once(',') {
                    Some((i, g)) => (Some(i.trim().parse().map_err(|_| bad())?), g.trim()),
                    None => (None, body),
                };
                let gap: f64 = gap.parse().map_err(|_| bad())?;
                if !(gap.is_finite() && gap != 0.0) {
                    return Err(bad());
                }
                Ok(ShiftRule::NearEigenvalue(index, gap))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ShiftRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftRule::Midpoint(None) => write!(f, "midpoint"),
            ShiftRule::Midpoint(Some(i)) => write!(f, "midpoint:{i}"),
            ShiftRule::Explicit(s) => write!(f, "explicit:{s}"),
            ShiftRule::NearEigenvalue(None, g) => write!(f, "near:{g}"),
            ShiftRule::NearEigenvalue(Some(i), g) => write!(f, "near:{i},{g}"),
        }
    }
}

/// Preconditioner used by T-harmonic rows.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecondChoice {
    Identity,
    AbsValueInverse,
    ShiftInverseSquared,
    Polynomial(Vec<f64>),
    /// `|A − σI|⁻¹` plus a random symmetric perturbation of relative size `eps`;
    /// does not commute with `A`.
    Perturbed(f64),
}

impl FromStr for PrecondChoice {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "identity" => Ok(PrecondChoice::Identity),
            "absinv" => Ok(PrecondChoice::AbsValueInverse),
            "invsq" => Ok(PrecondChoice::ShiftInverseSquared),
            "poly" => Ok(PrecondChoice::Polynomial(parse_list(body, "polynomial coefficient")?)),
            "perturbed" => {
                let eps: f64 = body.trim().parse().map_err(|_| HarnessError::Input(format!("bad perturbation {body:?}")))?;
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(HarnessError::Input("perturbation must be positive".into()));
                }
                Ok(PrecondChoice::Perturbed(eps))
            }
            other => Err(HarnessError::Input(format!("unknown preconditioner {other:?}"))),
        }
    }
}

impl fmt::Display for PrecondChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecondChoice::Identity => write!(f, "identity"),
            PrecondChoice::AbsValueInverse => write!(f, "absinv"),
            PrecondChoice::ShiftInverseSquared => write!(f, "invsq"),
            PrecondChoice::Polynomial(c) => {
                write!(f, "poly:{}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            PrecondChoice::Perturbed(e) => write!(f, "perturbed:{e}"),
        }
    }
}

/// Bound families selectable from the command line. `Lemma` and
/// `Transport` each produce two one-sided rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundSel {
    Lemma,
    Transport,
    Saad,
    Stewart,
    Harmonic,
    Deflated,
    Eigenspace,
    THarmonic,
}

impl BoundSel {
    pub const ALL: [BoundSel; 8] = [
        BoundSel::Lemma,
        BoundSel::Transport,
        BoundSel::Saad,
        BoundSel::Stewart,
        BoundSel::Harmonic,
        BoundSel::Deflated,
        BoundSel::Eigenspace,
        BoundSel::THarmonic,
    ];

    pub fn ids(self) -> &'static [BoundId] {
        match self {
            BoundSel::Lemma => &[BoundId::LemmaLower, BoundId::LemmaUpper],
            BoundSel::Transport => &[BoundId::TransportForward, BoundId::TransportBackward],
            BoundSel::Saad => &[BoundId::Saad],
            BoundSel::Stewart => &[BoundId::Stewart],
            BoundSel::Harmonic => &[BoundId::Harmonic],
            BoundSel::Deflated => &[BoundId::Deflated],
            BoundSel::Eigenspace => &[BoundId::Eigenspace],
            BoundSel::THarmonic => &[BoundId::THarmonic],
        }
    }

    /// Parses one tag; `all` expands to every family.
    pub fn parse_set(s: &str) -> Result<Vec<BoundSel>, HarnessError> {
        let mut out = Vec::new();
        for tag in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let sel: &[BoundSel] = match tag {
                "all" => &BoundSel::ALL,
                "lemma" => &[BoundSel::Lemma],
                "transport" => &[BoundSel::Transport],
                "saad" => &[BoundSel::Saad],
                "stewart" => &[BoundSel::Stewart],
                "harmonic" => &[BoundSel::Harmonic],
                "deflated" => &[BoundSel::Deflated],
                "eigenspace" => &[BoundSel::Eigenspace],
                "tharmonic" => &[BoundSel::THarmonic],
                other => return Err(HarnessError::Input(format!("unknown bound {other:?}"))),
            };
            for b in sel {
                if !out.contains(b) {
                    out.push(*b);
                }
            }
        }
        if out.is_empty() {
            return Err(HarnessError::Input("empty bound set".into()));
        }
        out.sort();
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    n: Option<usize>,
    n_max: Option<usize>,
    s: Option<usize>,
    s_max: Option<usize>,
    spectrum: Option<String>,
    shift: Option<String>,
    angle_phi: Option<f64>,
    angle_min: Option<f64>,
    multiplicity: Option<usize>,
    cluster_width: Option<f64>,
    target: Option<usize>,
    trials: Option<usize>,
    bounds: Option<Vec<String>>,
    precond: Option<String>,
    min_shift_gap: Option<f64>,
    force: Option<bool>,
    timing: Option<bool>,
    singular_trials: Option<Vec<usize>>,
}

/// One randomized experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Matrix order; drawn from `n..=n_max` per trial when `n_max` is set.
    pub n: usize,
    pub n_max: Option<usize>,
    pub s: usize,
    pub s_max: Option<usize>,
    pub spectrum: Spectrum,
    pub shift: ShiftRule,
    /// Tilt angle of `K` away from the target eigenspace. With `angle_min`
    /// set, drawn log-uniformly from `[angle_min, angle_phi]`.
    pub angle_phi: f64,
    pub angle_min: Option<f64>,
    pub multiplicity: usize,
    /// Spread of the forced multiple eigenvalue (0 gives an exact multiple).
    pub cluster_width: f64,
    /// Sorted eigenvalue index to target; nearest to σ when absent.
    pub target: Option<usize>,
    pub trials: usize,
    pub bounds: Vec<BoundSel>,
    pub precond: PrecondChoice,
    /// Rejects midpoint and explicit shifts closer than this to the spectrum.
    pub min_shift_gap: f64,
    /// Evaluate the T-harmonic bound even for non-commuting `T`.
    pub force: bool,
    /// Record wall time; off by default so output is reproducible.
    pub timing: bool,
    /// Trials whose shift is placed exactly on an eigenvalue (fault injection).
    pub singular_trials: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 20,
            n_max: None,
            s: 4,
            s_max: None,
            spectrum: Spectrum::Uniform { a: -10.0, b: 10.0 },
            shift: ShiftRule::Midpoint(None),
            angle_phi: 0.3,
            angle_min: None,
            multiplicity: 1,
            cluster_width: 0.0,
            target: None,
            trials: 100,
            bounds: BoundSel::ALL.to_vec(),
            precond: PrecondChoice::AbsValueInverse,
            min_shift_gap: 1e-3,
            force: false,
            timing: false,
            singular_trials: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Input(format!("config: {e}")))?;
        let d = Self::default();
        let bounds = match raw.bounds {
            Some(list) => BoundSel::parse_set(&list.join(","))?,
            None => d.bounds,
        };
        let cfg = Self {
            seed: raw.seed.unwrap_or(d.seed),
            n: raw.n.unwrap_or(d.n),
            n_max: raw.n_max,
            s: raw.s.unwrap_or(d.s),
            s_max: raw.s_max,
            spectrum: raw.spectrum.as_deref().map(str::parse).transpose()?.unwrap_or(d.spectrum),
            shift: raw.shift.as_deref().map(str::parse).transpose()?.unwrap_or(d.shift),
            angle_phi: raw.angle_phi.unwrap_or(d.angle_phi),
            angle_min: raw.angle_min,
            multiplicity: raw.multiplicity.unwrap_or(d.multiplicity),
            cluster_width: raw.cluster_width.unwrap_or(d.cluster_width),
            target: raw.target,
            trials: raw.trials.unwrap_or(d.trials),
            bounds,
            precond: raw.precond.as_deref().map(str::parse).transpose()?.unwrap_or(d.precond),
            min_shift_gap: raw.min_shift_gap.unwrap_or(d.min_shift_gap),
            force: raw.force.unwrap_or(d.force),
            timing: raw.timing.unwrap_or(d.timing),
            singular_trials: raw.singular_trials.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Input(m));
        let n_hi = self.n_max.unwrap_or(self.n);
        let s_hi = self.s_max.unwrap_or(self.s);
        if self.n < 2 || n_hi < self.n {
            return bad(format!("need 2 <= n <= n_max, got n = {}, n_max = {n_hi}", self.n));
        }
        if self.s < 1 || s_hi < self.s {
            return bad(format!("need 1 <= s <= s_max, got s = {}, s_max = {s_hi}", self.s));
        }
        if self.multiplicity < 1 || self.multiplicity > self.s {
            return bad(format!("need 1 <= multiplicity <= s, got {}", self.multiplicity));
        }
        if s_hi > self.n || 2 * self.multiplicity > self.n {
            return bad(format!("s_max = {s_hi} and 2·multiplicity must not exceed n = {}", self.n));
        }
        if self.trials < 1 {
            return bad("trials must be >= 1".into());
        }
        if !(self.angle_phi > 0.0 && self.angle_phi <= std::f64::consts::FRAC_PI_2) {
            return bad(format!("angle_phi must lie in (0, pi/2], got {}", self.angle_phi));
        }
        if let Some(lo) = self.angle_min {
            if !(lo > 0.0 && lo <= self.angle_phi) {
                return bad(format!("angle_min must lie in (0, angle_phi], got {lo}"));
            }
        }
        if !(self.cluster_width >= 0.0 && self.cluster_width.is_finite()) {
            return bad("cluster_width must be finite and nonnegative".into());
        }
        if self.min_shift_gap.is_nan() || self.min_shift_gap < 0.0 {
            return bad("min_shift_gap must be nonnegative".into());
        }
        if let Some(m) = self.spectrum.fixed_len() {
            if self.n_max.is_some_and(|hi| hi != self.n) {
                return bad("a fixed-length spectrum cannot be combined with n_max".into());
            }
            if m != self.n {
                return bad(format!("spectrum has {m} values but n = {}", self.n));
            }
            if self.multiplicity > 1 {
                return bad("multiplicity can only be forced on a uniform spectrum".into());
            }
        }
        if self.target.is_some_and(|t| t + self.multiplicity > self.n) {
            return bad("target index leaves no room for the multiplicity".into());
        }
        if matches!(self.precond, PrecondChoice::Perturbed(_)) && !self.force && self.bounds.contains(&BoundSel::THarmonic) {
            return bad("a perturbed (non-commuting) preconditioner requires force".into());
        }
        self.spectrum.validate(None)
    }
}
