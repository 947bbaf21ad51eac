//! Trial rows and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::HarnessError;
use ritzbound_core::bounds::BoundReport;

/// One bound evaluated on one trial instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub bound_id: String,
    pub n: usize,
    pub s: usize,
    pub sigma: f64,
    pub target_lambda: f64,
    pub lhs: f64,
    pub gamma: f64,
    pub delta: f64,
    pub kappa: Option<f64>,
    pub sin_angle_to_k: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    /// False when the bound's hypotheses do not hold (forced non-commuting `T`).
    pub asserted: bool,
    pub tightness: f64,
    /// `sin∠(X, K)` measured on the generated subspace.
    pub realized_sin: f64,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

pub const HEADER: [&str; 20] = [
    "trial",
    "seed",
    "bound_id",
    "n",
    "s",
    "sigma",
    "target_lambda",
    "lhs",
    "gamma",
    "delta",
    "kappa",
    "sin_angle_to_k",
    "rhs",
    "slack",
    "satisfied",
    "asserted",
    "tightness",
    "realized_sin",
    "wall_time_ms",
    "error",
];

impl TrialRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn from_report(trial: usize, seed: u64, n: usize, s: usize, sigma: f64, target_lambda: f64, realized_sin: f64, r: &BoundReport) -> Self {
        Self {
            trial,
            seed,
            bound_id: r.bound_id.tag().to_string(),
            n,
            s,
            sigma,
            target_lambda,
            lhs: r.lhs,
            gamma: r.gamma,
            delta: r.delta,
            kappa: r.kappa,
            sin_angle_to_k: r.sin_angle_to_k,
            rhs: r.rhs,
            slack: r.slack,
            satisfied: r.satisfied,
            asserted: true,
            tightness: r.tightness(),
            realized_sin,
            wall_time_ms: 0.0,
            error: None,
        }
    }

    /// Row for a failed evaluation; numeric fields are NaN.
    pub fn failed(trial: usize, seed: u64, bound_id: &str, n: usize, s: usize, sigma: f64, error: String) -> Self {
        let nan = f64::NAN;
        Self {
            trial,
            seed,
            bound_id: bound_id.to_string(),
            n,
            s,
            sigma,
            target_lambda: nan,
            lhs: nan,
            gamma: nan,
            delta: nan,
            kappa: None,
            sin_angle_to_k: nan,
            rhs: nan,
            slack: nan,
            satisfied: false,
            asserted: true,
            tightness: nan,
            realized_sin: nan,
            wall_time_ms: 0.0,
            error: Some(error),
        }
    }

    /// A row counts as a violation when it was asserted, evaluated and not satisfied.
    pub fn is_violation(&self) -> bool {
        self.asserted && self.error.is_none() && !self.satisfied
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.seed.to_string(),
            self.bound_id.clone(),
            self.n.to_string(),
            self.s.to_string(),
            fmt_f64(self.sigma),
            fmt_f64(self.target_lambda),
            fmt_f64(self.lhs),
            fmt_f64(self.gamma),
            fmt_f64(self.delta),
            self.kappa.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.sin_angle_to_k),
            fmt_f64(self.rhs),
            fmt_f64(self.slack),
            self.satisfied.to_string(),
            self.asserted.to_string(),
            fmt_f64(self.tightness),
            fmt_f64(self.realized_sin),
            fmt_f64(self.wall_time_ms),
            self.error.clone().unwrap_or_default(),
        ]
    }

    pub fn parse_fields(f: &[&str]) -> Result<Self, HarnessError> {
        if f.len() != HEADER.len() {
            return Err(HarnessError::Input(format!("expected {} fields, found {}", HEADER.len(), f.len())));
        }
        let int = |i: usize| f[i].parse::<u64>().map_err(|_| HarnessError::Input(format!("bad {} {:?}", HEADER[i], f[i])));
        let real = |i: usize| f[i].parse::<f64>().map_err(|_| HarnessError::Input(format!("bad {} {:?}", HEADER[i], f[i])));
        let flag = |i: usize| f[i].parse::<bool>().map_err(|_| HarnessError::Input(format!("bad {} {:?}", HEADER[i], f[i])));
        Ok(Self {
            trial: int(0)? as usize,
            seed: int(1)?,
            bound_id: f[2].to_string(),
            n: int(3)? as usize,
            s: int(4)? as usize,
            sigma: real(5)?,
            target_lambda: real(6)?,
            lhs: real(7)?,
            gamma: real(8)?,
            delta: real(9)?,
            kappa: if f[10].is_empty() { None } else { Some(real(10)?) },
            sin_angle_to_k: real(11)?,
            rhs: real(12)?,
            slack: real(13)?,
            satisfied: flag(14)?,
            asserted: flag(15)?,
            tightness: real(16)?,
            realized_sin: real(17)?,
            wall_time_ms: real(18)?,
            error: if f[19].is_empty() { None } else { Some(f[19].to_string()) },
        })
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Writes rows with an optional leading column (e.g. a sweep bucket).
pub fn write_rows<W: Write>(w: W, lead: Option<&str>, rows: &[(Option<f64>, &TrialRecord)]) -> Result<(), HarnessError> {
    let mut out = writer(w);
    let mut header: Vec<&str> = lead.into_iter().collect();
    header.extend(HEADER);
    out.write_record(&header)?;
    for (bucket, r) in rows {
        let mut f: Vec<String> = Vec::with_capacity(header.len());
        if lead.is_some() {
            f.push(bucket.map(fmt_f64).unwrap_or_default());
        }
        f.extend(r.fields());
        out.write_record(&f)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(w: W, records: &[TrialRecord]) -> Result<(), HarnessError> {
    let rows: Vec<(Option<f64>, &TrialRecord)> = records.iter().map(|r| (None, r)).collect();
    write_rows(w, None, &rows)
}

/// Header row then one row per record; UTF-8 with LF line endings.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), records)
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(HarnessError::Input("unexpected CSV header".into()));
    }
    rdr.records()
        .map(|row| {
            let row = row?;
            let f: Vec<&str> = row.iter().collect();
            TrialRecord::parse_fields(&f)
        })
        .collect()
}
