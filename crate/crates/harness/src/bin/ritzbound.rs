use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ritzbound_core::extraction::{harmonic_via_shift_invert, rayleigh_ritz, t_harmonic_rayleigh_ritz, test_basis};
use ritzbound_core::linalg::qr_orthonormalize;
use ritzbound_core::linalg::text::{read_dense, read_symmetric, write_symmetric};
use ritzbound_core::SpectralMatrix;
use ritzbound_harness::config::{BoundSel, ExperimentConfig, PrecondChoice, ShiftRule, Spectrum};
use ritzbound_harness::generate::{gen_matrix, rng_from_seed};
use ritzbound_harness::record::{fmt_f64, write_csv, write_rows};
use ritzbound_harness::sweep::{self, build_preconditioner, run_sweep, Outcome, PRECOND_HEADER};
use ritzbound_harness::HarnessError;

/// Rayleigh-Ritz extraction and a priori angle bound verification
#[derive(Parser, Debug)]
#[command(name = "ritzbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random symmetric matrix with a prescribed spectrum
    Gen {
        #[arg(long)]
        n: usize,
        /// uniform:a,b | clustered:c/w/m;... | explicit:v1,v2,...
        #[arg(long)]
        spectrum: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract approximate eigenpairs of a matrix from a subspace
    Extract {
        #[arg(long)]
        matrix: PathBuf,
        /// Dense n×s block; its columns are orthonormalized first
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<f64>,
        /// identity | absinv | invsq | poly:c0,c1,...
        #[arg(long, default_value = "identity")]
        precond: String,
    },
    /// Verify bounds on random instances; exit status 0 iff all hold
    Verify {
        /// saad | stewart | lemma | transport | harmonic | deflated | eigenspace | tharmonic | all (comma separated)
        #[arg(long, default_value = "all")]
        bound: String,
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification over a range of one parameter, one bucket per value
    Sweep {
        #[arg(long, value_enum)]
        vary: VaryArg,
        /// a:b:steps
        #[arg(long)]
        range: String,
        /// Spacing of the range (default: log for shift-gap and cluster-width, linear for angle)
        #[arg(long, value_enum)]
        scale: Option<ScaleArg>,
        #[arg(long, default_value = "harmonic")]
        bound: String,
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the T-harmonic bound under identity, absinv and invsq preconditioning
    ComparePrecond {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long, default_value_t = 0.3)]
        phi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    Rr,
    Hrr,
    Thrr,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum VaryArg {
    ShiftGap,
    Angle,
    ClusterWidth,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScaleArg {
    Lin,
    Log,
}

/// Experiment settings; flags override values read from `--config`.
#[derive(Args, Debug)]
struct ExperimentArgs {
    /// TOML experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    s_max: Option<usize>,
    #[arg(long)]
    spectrum: Option<String>,
    /// midpoint | midpoint:i | explicit:σ | near:gap | near:i,gap
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    phi_min: Option<f64>,
    #[arg(long)]
    multiplicity: Option<usize>,
    #[arg(long)]
    cluster_width: Option<f64>,
    /// identity | absinv | invsq | poly:c0,c1,... | perturbed:eps
    #[arg(long)]
    precond: Option<String>,
    /// Evaluate the T-harmonic bound on non-commuting preconditioners without asserting it
    #[arg(long)]
    force: bool,
    /// Record wall time per row (makes output nondeterministic)
    #[arg(long)]
    timing: bool,
}

impl ExperimentArgs {
    fn resolve(&self, bound: &str) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_toml(&fs::read_to_string(p)?)?,
            None => ExperimentConfig::default(),
        };
        cfg.bounds = BoundSel::parse_set(bound)?;
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if self.n_max.is_some() {
            cfg.n_max = self.n_max;
        }
        if let Some(v) = self.s {
            cfg.s = v;
        }
        if self.s_max.is_some() {
            cfg.s_max = self.s_max;
        }
        if let Some(v) = &self.spectrum {
            cfg.spectrum = v.parse::<Spectrum>()?;
        }
        if let Some(v) = &self.shift {
            cfg.shift = v.parse::<ShiftRule>()?;
        }
        if let Some(v) = self.phi {
            cfg.angle_phi = v;
        }
        if self.phi_min.is_some() {
            cfg.angle_min = self.phi_min;
        }
        if let Some(v) = self.multiplicity {
            cfg.multiplicity = v;
        }
        if let Some(v) = self.cluster_width {
            cfg.cluster_width = v;
        }
        if let Some(v) = &self.precond {
            cfg.precond = v.parse::<PrecondChoice>()?;
        }
        cfg.force |= self.force;
        cfg.timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn report(o: &Outcome) {
    eprintln!("rows: {}  violations: {}  errors: {}  not asserted: {}", o.rows, o.violations, o.errors, o.unasserted);
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Gen { n, spectrum, seed, out } => {
            let spec: Spectrum = spectrum.parse()?;
            let a = gen_matrix(&spec, n, seed)?;
            fs::write(&out, write_symmetric(a.matrix()))?;
            Ok(0)
        }
        Command::Extract { matrix, subspace, method, shift, precond } => {
            let a = SpectralMatrix::new(read_symmetric(&fs::read_to_string(matrix)?)?)?;
            let k = qr_orthonormalize(&read_dense(&fs::read_to_string(subspace)?)?)?;
            let need_shift = || shift.ok_or_else(|| HarnessError::Input("--shift is required for hrr and thrr".into()));
            let (set, t) = match method {
                MethodArg::Rr => (rayleigh_ritz(a.matrix(), &k)?, None),
                MethodArg::Hrr => (harmonic_via_shift_invert(&a, &k, need_shift()?)?, None),
                MethodArg::Thrr => {
                    let sigma = need_shift()?;
                    let choice: PrecondChoice = precond.parse()?;
                    if matches!(choice, PrecondChoice::Perturbed(_)) {
                        return Err(HarnessError::Input("extract does not take a perturbed preconditioner".into()));
                    }
                    let spec = build_preconditioner(&choice, &a, sigma, &mut rng_from_seed(0))?;
                    let set = t_harmonic_rayleigh_ritz(&a, &k, sigma, spec.realized())?;
                    (set, Some(spec))
                }
            };
            let residuals = set.residual_norms(a.matrix());
            let test = test_basis(&a, &k, &set, t.as_ref().map(|s| s.realized()));
            let projected = set.projected_residuals(a.matrix(), &test);
            let mut out = std::io::stdout().lock();
            writeln!(out, "index\tvalue\tresidual\tprojected_residual")?;
            for j in 0..set.len() {
                writeln!(out, "{j}\t{}\t{}\t{}", fmt_f64(set.values[j]), fmt_f64(residuals[j]), fmt_f64(projected[j]))?;
            }
            Ok(0)
        }
        Command::Verify { bound, exp, out } => {
            let cfg = exp.resolve(&bound)?;
            let records = run_sweep(&cfg);
            write_csv(open_out(&out)?, &records)?;
            let o = Outcome::of(&records);
            report(&o);
            Ok(o.exit_code())
        }
        Command::Sweep { vary, range, scale, bound, exp, out } => {
            let cfg = exp.resolve(&bound)?;
            let vary = match vary {
                VaryArg::ShiftGap => sweep::Vary::ShiftGap,
                VaryArg::Angle => sweep::Vary::Angle,
                VaryArg::ClusterWidth => sweep::Vary::ClusterWidth,
            };
            let log = match scale {
                Some(ScaleArg::Log) => true,
                Some(ScaleArg::Lin) => false,
                None => !matches!(vary, sweep::Vary::Angle),
            };
            let values = sweep::parse_range(&range, log)?;
            let rows = sweep::run_vary(&cfg, vary, &values)?;
            let refs: Vec<(Option<f64>, &ritzbound_harness::TrialRecord)> = rows.iter().map(|(b, r)| (Some(*b), r)).collect();
            write_rows(open_out(&out)?, Some("bucket"), &refs)?;
            eprintln!("bucket\tbound_id\trows\tsatisfied\tmean_tightness\tmean_kappa");
            for s in sweep::summarize(&rows) {
                eprintln!("{:.6e}\t{}\t{}\t{}\t{:.6e}\t{:.6e}", s.bucket, s.bound_id, s.rows, s.satisfied, s.mean_tightness, s.mean_kappa);
            }
            let records: Vec<_> = rows.into_iter().map(|(_, r)| r).collect();
            let o = Outcome::of(&records);
            report(&o);
            Ok(o.exit_code())
        }
        Command::ComparePrecond { matrix, shift, trials, s, phi, seed, out } => {
            let a = SpectralMatrix::new(read_symmetric(&fs::read_to_string(matrix)?)?)?;
            let rows = sweep::compare_preconditioners(&a, shift, trials, s, phi, seed)?;
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(open_out(&out)?);
            w.write_record(PRECOND_HEADER)?;
            for r in &rows {
                w.write_record(r.fields())?;
            }
            w.flush()?;
            let violated = rows.iter().any(|r| r.error.is_none() && !r.satisfied);
            let failed = rows.iter().any(|r| r.error.is_some());
            Ok(if violated { 1 } else if failed { 3 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
