use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::output::Format;

pub const DEFAULT_SWEEP_SNR: &str = "10:1e12:12";
pub const DEFAULT_REPORT_SNR: &str = "1e4:1e10:4";
pub const DEFAULT_UPSILON: &str = "1e-3:4:60";

#[derive(Debug, Parser)]
#[command(
    name = "prelog-lab",
    version,
    about = "Capacity bounds, pre-log reports and fading simulations for noncoherent fading channels",
    after_help = "Models: rayleigh-band:W=x | onoff:W=x | phase-noise | custom:spectrum=FILE,tail=rayleigh|onoff|phase-noise\n\
                  Grids: lo:hi:points (log-spaced) | v | v1,v2,...\n\
                  Exit codes: 0 ok, 2 usage, 3 i/o, 4 numerical failure.\n\
                  PRELOG_LAB_THREADS caps the worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zero-set measure, spectral log-integral and its ratio to log snr
    Spectrum(SpectrumArgs),
    /// Optimized lower bound and coherent upper bound over an snr grid
    BoundSweep(SweepArgs),
    /// Analytic pre-log values and the finite-snr lower-bound trajectory
    PrelogReport(ReportArgs),
    /// Finite-n log-determinant rate against the spectral log-integral
    Szego(SzegoArgs),
    /// Sample path of a fading model plus an autocovariance check
    Simulate(SimulateArgs),
    /// MISO pre-log lower bound for independent antennas
    Miso(MisoArgs),
    /// Print the manual page in roff format
    Man(ManArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON file whose keys override the flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Fading model, see the model list in --help
    #[arg(long, value_name = "MODEL", required_unless_present = "config")]
    pub model: Option<String>,
    #[arg(long, value_name = "GRID", default_value = DEFAULT_SWEEP_SNR)]
    pub snr: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Fading model, see the model list in --help
    #[arg(long, value_name = "MODEL", required_unless_present = "config")]
    pub model: Option<String>,
    #[arg(long, value_name = "GRID", default_value = DEFAULT_SWEEP_SNR)]
    pub snr: String,
    /// Threshold grid searched for the lower bound
    #[arg(long, value_name = "GRID", default_value = DEFAULT_UPSILON)]
    pub upsilon: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Fading model, see the model list in --help
    #[arg(long, value_name = "MODEL", required_unless_present = "config")]
    pub model: Option<String>,
    #[arg(long, value_name = "GRID", default_value = DEFAULT_REPORT_SNR)]
    pub snr: String,
    #[arg(long, value_name = "GRID", default_value = DEFAULT_UPSILON)]
    pub upsilon: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SzegoArgs {
    /// Fading model, see the model list in --help
    #[arg(long, value_name = "MODEL", required_unless_present = "config")]
    pub model: Option<String>,
    #[arg(long, value_name = "SNR", default_value = "100")]
    pub snr: String,
    /// Comma list of matrix dimensions
    #[arg(long, value_name = "LIST", default_value = "64,256,512")]
    pub n: String,
    /// Largest dimension accepted
    #[arg(long, value_name = "N", default_value_t = prelog_core::toeplitz::DEFAULT_MAX_DIMENSION)]
    pub max_dim: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Fading model, see the model list in --help
    #[arg(long, value_name = "MODEL", required_unless_present = "config")]
    pub model: Option<String>,
    /// Path length
    #[arg(long, value_name = "N", default_value = "100000")]
    pub n: String,
    /// Seed for all random streams
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest lag in the autocovariance table
    #[arg(long, value_name = "M", default_value_t = 8)]
    pub max_lag: usize,
    /// Random harmonics used for Gaussian synthesis
    #[arg(long, value_name = "M", default_value_t = prelog_core::processes::DEFAULT_HARMONICS)]
    pub harmonics: usize,
    /// Write the path in little-endian binary instead of --format
    #[arg(long)]
    pub binary: bool,
    /// Autocovariance table file; stdout when absent
    #[arg(long, value_name = "FILE")]
    pub autocov: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MisoArgs {
    /// Per-antenna spectra: W=x for a flat band, file=path.json otherwise
    #[arg(long, value_name = "LIST", required_unless_present = "config")]
    pub spectra: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ManArgs {
    /// Output file; stdout when absent
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// A JSON number or string, kept as text and parsed like the flag it replaces.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Number(serde_json::Number),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Text(s) => s.clone(),
            Scalar::Number(n) => n.to_string(),
        }
    }
}

/// Config file contents. Keys not used by a command are ignored.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub snr: Option<Scalar>,
    pub upsilon: Option<Scalar>,
    pub n: Option<Scalar>,
    pub seed: Option<u64>,
    pub max_lag: Option<usize>,
    pub max_dim: Option<usize>,
    pub harmonics: Option<usize>,
    pub binary: Option<bool>,
    pub autocov: Option<PathBuf>,
    pub spectra: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<ConfigFile> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

fn set_opt<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
    if value.is_some() {
        *slot = value.clone();
    }
}

/// A value that may come from either a flag or the config file.
pub fn required<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| CliError::usage(format!("{flag} is required (as a flag or in the config file)")))
}

fn set_text(slot: &mut String, value: &Option<Scalar>) {
    if let Some(v) = value {
        *slot = v.text();
    }
}

impl Common {
    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.output, &cfg.output);
        set(&mut self.format, &cfg.format);
    }
}

/// Applies `--config`, if given, on top of the parsed flags.
pub trait Configurable {
    fn common(&self) -> &Common;
    fn apply(&mut self, cfg: &ConfigFile);

    fn resolve(mut self) -> CliResult<Self>
    where
        Self: Sized,
    {
        if let Some(path) = self.common().config.clone() {
            let cfg = ConfigFile::load(&path)?;
            self.apply(&cfg);
        }
        Ok(self)
    }
}

impl Configurable for SpectrumArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.model, &cfg.model);
        set_text(&mut self.snr, &cfg.snr);
        self.common.apply(cfg);
    }
}

impl Configurable for SweepArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.model, &cfg.model);
        set_text(&mut self.snr, &cfg.snr);
        set_text(&mut self.upsilon, &cfg.upsilon);
        self.common.apply(cfg);
    }
}

impl Configurable for ReportArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.model, &cfg.model);
        set_text(&mut self.snr, &cfg.snr);
        set_text(&mut self.upsilon, &cfg.upsilon);
        self.common.apply(cfg);
    }
}

impl Configurable for SzegoArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.model, &cfg.model);
        set_text(&mut self.snr, &cfg.snr);
        set_text(&mut self.n, &cfg.n);
        set(&mut self.max_dim, &cfg.max_dim);
        self.common.apply(cfg);
    }
}

impl Configurable for SimulateArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.model, &cfg.model);
        set_text(&mut self.n, &cfg.n);
        set(&mut self.seed, &cfg.seed);
        set(&mut self.max_lag, &cfg.max_lag);
        set(&mut self.harmonics, &cfg.harmonics);
        set(&mut self.binary, &cfg.binary);
        set_opt(&mut self.autocov, &cfg.autocov);
        self.common.apply(cfg);
    }
}

impl Configurable for MisoArgs {
    fn common(&self) -> &Common {
        &self.common
    }

    fn apply(&mut self, cfg: &ConfigFile) {
        set_opt(&mut self.spectra, &cfg.spectra);
        self.common.apply(cfg);
    }
}
