//! The `dho` command line: figure data series as CSV/JSON and a validation
//! suite. The binary is a thin wrapper around [`run`].

mod commands;
pub mod output;
pub mod presets;
pub mod validate;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::coherence::Basis;
use crate::identical::Statistics;
pub use output::{Format, Panel};
pub use presets::{Layout, Preset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dho", version, about = "Quantum damped harmonic oscillator: coherence, Bohmian and identical-particle series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relative entropy of coherence of coherent and cat states.
    Coherence(SeriesArgs),
    /// Probability density and current on a space-time grid.
    Grid(SeriesArgs),
    /// Bohmian trajectories of a two-packet superposition.
    Trajectories(SeriesArgs),
    /// Mean square separation of two identical particles.
    Mss(SeriesArgs),
    /// Relative joint detection probability p± in a window.
    Detect(SeriesArgs),
    /// Coherence of the reduced single-particle state per statistics.
    Spcoherence(SeriesArgs),
    /// Run the oracle suite and report residuals.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Energy,
    Position,
    Momentum,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Energy => Basis::Energy,
            BasisArg::Position => Basis::Position,
            BasisArg::Momentum => Basis::Momentum,
        }
    }
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let mut parts = s.split(',');
    let re = parts.next().unwrap_or("").trim();
    let re: f64 = re.parse().map_err(|_| format!("not a number: {re:?}"))?;
    let im: f64 = match parts.next() {
        Some(v) => v.trim().parse().map_err(|_| format!("not a number: {v:?}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err("expected RE or RE,IM".into());
    }
    if !(re.is_finite() && im.is_finite()) {
        return Err("components must be finite".into());
    }
    Ok(Complex64::new(re, im))
}

#[derive(Args, Debug, Clone, Default)]
pub struct SeriesArgs {
    /// Named parameter set: fig1 … fig8.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Coherent amplitude α as RE or RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    /// Second amplitude β (defaults to -α where a pair is needed).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    /// Damping constants, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma0: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Output time step (sweep step for |α|² sweeps).
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Bath temperature k_B T in units of ħω0.
    #[arg(long, allow_hyphen_values = true)]
    pub kbt: Option<f64>,
    /// Detector half-widths, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d: Vec<f64>,
    #[arg(long)]
    pub stats: Option<Statistics>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Fock-space truncation.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    /// Output file; multi-panel CSV writes <stem>-<panel>.csv next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits in the output.
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ValidateArgs {
    /// Master-equation time step used by the integrator checks.
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Coherence,
    Grid,
    Trajectories,
    Mss,
    Detect,
    Spcoherence,
}

/// Fully resolved parameters of one run; echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub preset: String,
    pub layout: Layout,
    pub alpha: [f64; 2],
    pub beta: Option<[f64; 2]>,
    pub gamma0: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub kbt: Option<f64>,
    pub d: Vec<f64>,
    pub stats: Vec<Statistics>,
    pub basis: Basis,
    pub n_max: Option<usize>,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    /// Upper end and step of |α|² sweeps.
    pub alpha2_max: f64,
    pub alpha2_step: f64,
    /// Time of |α|² sweeps.
    pub t0: f64,
    /// Extra amplitudes, one panel each (identical-particle presets).
    pub alphas: Vec<f64>,
    /// Trajectories launched per packet.
    pub per_packet: usize,
    pub format: Format,
    pub precision: usize,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Validation(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

/// Compute the panels of a resolved run.
pub fn compute(cfg: &RunConfig) -> Result<Vec<Panel>, CliError> {
    match cfg.command {
        CommandKind::Coherence => commands::coherence(cfg),
        CommandKind::Grid => commands::grid(cfg),
        CommandKind::Trajectories => commands::trajectories(cfg),
        CommandKind::Mss => commands::mss(cfg),
        CommandKind::Detect => commands::detect(cfg),
        CommandKind::Spcoherence => commands::spcoherence(cfg),
    }
}

fn run_series(kind: CommandKind, args: &SeriesArgs) -> Result<(), CliError> {
    let cfg = presets::resolve(kind, args)?;
    let panels = compute(&cfg)?;
    let echo = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    output::emit(&panels, args.out.as_deref(), cfg.format, &cfg.preset, &echo, cfg.precision)
        .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
    Ok(())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Coherence(a) => run_series(CommandKind::Coherence, a),
        Command::Grid(a) => run_series(CommandKind::Grid, a),
        Command::Trajectories(a) => run_series(CommandKind::Trajectories, a),
        Command::Mss(a) => run_series(CommandKind::Mss, a),
        Command::Detect(a) => run_series(CommandKind::Detect, a),
        Command::Spcoherence(a) => run_series(CommandKind::Spcoherence, a),
        Command::Validate(a) => validate::run_validate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dho: {e}");
            e.exit_code()
        }
    }
}
