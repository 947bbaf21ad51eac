//! Experiment harness for `ritzbound-core`: seeded generators, randomized
//! bound-verification sweeps and CSV output.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`; trial `i` of a run with base seed `b` uses seed
//! `b + i·0x9E3779B97F4A7C15 (mod 2⁶⁴)`, so each trial is reproducible on its own.

pub mod config;
pub mod error;
pub mod generate;
pub mod record;
pub mod sweep;

pub use config::{BoundSel, ExperimentConfig, PrecondChoice, ShiftRule, Spectrum};
pub use error::HarnessError;
pub use generate::{build_instance, gen_matrix, gen_subspace, trial_seed, Instance};
pub use record::{emit_csv, read_csv, write_csv, TrialRecord};
pub use sweep::{run_sweep, run_trial, Outcome};
