//! Command-line front end.
//!
//! Every artifact starts with an echo of the fully resolved configuration,
//! and identical arguments produce byte-identical output regardless of the
//! worker count (set with the `ARPS_SDE_THREADS` environment variable).

mod commands;
mod figures;
mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::decline::{ArpsParams, ModelKind};
use crate::error::Error;
use crate::fpt::DurbinForm;
use crate::sim::Scheme;

pub use figures::{write_figures, FIGURE_B_VALUES, FIGURE_FILES};

/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for out-of-range parameters.
pub const EXIT_INVALID: i32 = 3;
/// Exit status for unreadable inputs or unwritable outputs.
pub const EXIT_IO: i32 = 4;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 5;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ARPS_SDE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Model(_) => EXIT_INVALID,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "arps-sde", version, about = "Stochastic Arps decline curves and first-passage times")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate sample paths of the production rate.
    Simulate(SimulateArgs),
    /// Closed-form mean and variance on a time grid.
    Moments(MomentsArgs),
    /// Monte Carlo first-passage time of a level.
    Fpt(FptArgs),
    /// Durbin approximation to the hitting-time density (linear volatility).
    Durbin(DurbinArgs),
    /// Check stochastic ordering of hitting times between two shape values.
    OrderCheck(OrderArgs),
    /// Simulate cumulative production paths.
    Cumulative(SimulateArgs),
    /// Regenerate every figure as CSV and SVG.
    Figures(FiguresArgs),
}

/// Parameter presets matching the published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Constant volatility, sigma^2 = 1, Euler-Maruyama.
    Fig1,
    /// Linear volatility, sigma^2 = 0.01, Euler-Maruyama.
    Fig2,
    /// Linear volatility, sigma^2 = 0.01, x = 100.
    Fig3,
    /// Constant volatility, sigma^2 = 1, cumulative production.
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Named parameter preset; explicit flags override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// const-vol or linear-vol.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Initial rate [default: 380].
    #[arg(long)]
    pub q0: Option<f64>,
    /// Initial decline rate [default: 3e-4].
    #[arg(long)]
    pub d0: Option<f64>,
    /// Arps exponent in [0, 1] [default: 0.5].
    #[arg(long)]
    pub b: Option<f64>,
    /// Volatility squared [default: 1, or 0.01 for linear-vol presets].
    #[arg(long)]
    pub sigma2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Last simulated time.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a static SVG line plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// em or exact [default: exact, em for the fig1/fig2 presets].
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long, default_value_t = 5)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Direct,
    TimeChange,
}

#[derive(Debug, Clone, Args)]
pub struct FptArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Level to hit [default: 100].
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// direct, or time-change (constant volatility only).
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    pub method: MethodArg,
    /// Step in the tau clock for the time-change method [default: 5].
    #[arg(long)]
    pub dtau: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Disable the Brownian-bridge crossing correction.
    #[arg(long)]
    pub no_bridge: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DurbinArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub x: Option<f64>,
    /// corrected or as-printed.
    #[arg(long, default_value = "corrected")]
    pub form: DurbinForm,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub x: Option<f64>,
    /// Smaller Arps exponent.
    #[arg(long, default_value_t = 0.0)]
    pub b_low: f64,
    /// Larger Arps exponent.
    #[arg(long, default_value_t = 1.0)]
    pub b_high: f64,
    /// Hitting times of the first group (CSV column `t`) instead of simulating.
    #[arg(long, requires = "samples_b")]
    pub samples_a: Option<PathBuf>,
    #[arg(long, requires = "samples_a")]
    pub samples_b: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 999)]
    pub resamples: usize,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// Directory receiving fig*.csv and fig*.svg.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// Fully resolved model parameters, echoed into every artifact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedModel {
    pub preset: Option<Preset>,
    pub model: ModelKind,
    pub q0: f64,
    pub d0: f64,
    pub b: f64,
    pub sigma2: f64,
    #[serde(skip)]
    pub params: ArpsParams,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ResolvedModel, CliError> {
        let (model, sigma2) = match self.preset {
            Some(Preset::Fig2 | Preset::Fig3) => (ModelKind::LinearVol, 0.01),
            Some(Preset::Fig1 | Preset::Fig4) | None => (ModelKind::ConstantVol, 1.0),
        };
        let model = self.model.unwrap_or(model);
        let sigma2 = self.sigma2.unwrap_or(if self.preset.is_none() && model == ModelKind::LinearVol {
            0.01
        } else {
            sigma2
        });
        let q0 = self.q0.unwrap_or(380.0);
        let d0 = self.d0.unwrap_or(3e-4);
        let b = self.b.unwrap_or(0.5);
        let params = ArpsParams::with_sigma2(q0, d0, b, sigma2)?;
        Ok(ResolvedModel {
            preset: self.preset,
            model,
            q0,
            d0,
            b,
            sigma2,
            params,
        })
    }

    pub(crate) fn default_scheme(&self) -> Scheme {
        match self.preset {
            Some(Preset::Fig1 | Preset::Fig2) => Scheme::EulerMaruyama,
            _ => Scheme::Exact,
        }
    }
}

impl OutputArgs {
    pub(crate) fn format(&self, default: Format) -> Format {
        self.format.unwrap_or_else(|| {
            match self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                _ => default,
            }
        })
    }
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Parses `argv` (program name first) and runs the command, writing the
/// primary artifact to `stdout` when no `--out` is given.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    // Levels and shape values may be negative on the command line; those are
    // rejected as invalid values rather than mistaken for flags.
    let parsed = Cli::command()
        .mut_subcommands(|sub| sub.allow_negative_numbers(true))
        .try_get_matches_from(argv)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string()));
        }
    };
    // Commands write into a buffer so the work can run on a dedicated pool.
    let mut buf = Vec::new();
    match thread_count()? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            pool.install(|| commands::dispatch(cli.command, &mut buf))?
        }
        None => commands::dispatch(cli.command, &mut buf)?,
    }
    stdout.write_all(&buf).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Runs the command line and returns the process exit status, printing any
/// diagnostic to stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(argv, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("arps-sde: {}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
