//! Command-line driver for the quantum Brownian motion redundancy experiments.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::Table;

#[derive(Debug, Parser)]
#[command(
    name = "qbm",
    version,
    about = "Redundant records of a decohering oscillator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Partial-information curves, one CSV per (t, s).
    Pip,
    /// Redundancy over the (s, δ, t) grid.
    Redundancy,
    /// Per-band information spectra, one CSV per (t, s).
    Bands,
    /// All of the above.
    All,
}

/// Flags that override the config file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n_bands: Option<usize>,
    /// Squeeze factors, comma separated.
    #[arg(long, global = true)]
    pub squeeze: Option<String>,
    /// Squeezed quadrature: x or p.
    #[arg(long, global = true)]
    pub axis: Option<String>,
    /// Evolution times, comma separated.
    #[arg(long, global = true)]
    pub times: Option<String>,
    /// Information deficits, comma separated.
    #[arg(long, global = true)]
    pub delta: Option<String>,
    /// Fragment fractions, comma separated.
    #[arg(long, global = true)]
    pub fractions: Option<String>,
    /// Monte-Carlo samples per grid point.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub allow_past_recurrence: bool,
}

impl Overrides {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let lists = [
            ("squeeze", &self.squeeze),
            ("axis", &self.axis),
            ("times", &self.times),
            ("delta", &self.delta),
            ("fractions", &self.fractions),
        ];
        for (key, value) in lists {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.n_bands {
            cfg.n_bands = n;
        }
        if let Some(n) = self.samples {
            cfg.samples = Some(n);
        }
        if self.allow_past_recurrence {
            cfg.allow_past_recurrence = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs `command` and writes its tables; returns the CSV paths written.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    output::ensure_writable(&cfg.out_dir)?;
    let mut tables = Vec::new();
    if matches!(command, Command::Pip | Command::All) {
        tables.extend(experiments::run_pip(cfg)?);
    }
    if matches!(command, Command::Redundancy | Command::All) {
        tables.push(experiments::run_redundancy_sweep(cfg)?);
    }
    if matches!(command, Command::Bands | Command::All) {
        tables.extend(experiments::run_band_spectrum(cfg)?);
    }
    let echo = cfg.echo();
    tables
        .iter()
        .map(|t| output::write_table(&cfg.out_dir, t, &echo))
        .collect()
}
