//! Front end for `sel-core`: verification suites, spectra, identity fuzzing,
//! convolution profiles and extremizer searches.
//!
//! Every flag can also be set through an environment variable with the
//! `SEL_` prefix; flags win over the environment, which wins over defaults.

pub mod commands;
pub mod report;
pub mod verify;

use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sel_core::maximizer::InitKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] sel_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(e) => match e {
                sel_core::Error::InvalidParameter { .. }
                | sel_core::Error::DegreeMismatch { .. }
                | sel_core::Error::InsufficientExactness { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sel",
    version,
    about = "Sharp L2 -> L4 extension inequality on the sphere, checked numerically"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Funk–Hecke multipliers of |w - v|: closed form against quadrature.
    Spectrum(SpectrumArgs),
    /// Fuzz the four-term identity on random points of Gamma.
    Identity(IdentityArgs),
    /// Gradient ascent on Phi from a chosen initialization.
    Search(SearchArgs),
    /// Profile or L2 norm of sigma * sigma.
    Convolution(ConvolutionArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Polar rings of the sphere grid (2 n_t azimuths each).
    #[arg(long, env = "SEL_N_T", default_value_t = 32)]
    pub n_t: usize,
    /// Angles on each circle slice.
    #[arg(long, env = "SEL_N_C", default_value_t = 16)]
    pub n_c: usize,
    /// Radial nodes of the ball grid.
    #[arg(long, env = "SEL_N_R", default_value_t = 48)]
    pub n_r: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, env = "SEL_OUT")]
    pub out: Option<PathBuf>,
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long)]
    pub csv: bool,
}

impl OutputArgs {
    pub fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            default
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Band limit of the random test functions.
    #[arg(long, env = "SEL_DEGREE", default_value_t = 8)]
    pub degree: usize,
    #[arg(long, env = "SEL_SEED", default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Highest degree K.
    #[arg(long, env = "SEL_DEGREE", default_value_t = 50)]
    pub degree: usize,
    /// Gauss–Legendre nodes for the quadrature multipliers.
    #[arg(long, env = "SEL_N_QUAD", default_value_t = 64)]
    pub n_quad: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    #[arg(long, env = "SEL_SAMPLES", default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, env = "SEL_SEED", default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    PerturbedConstant,
    Zonal,
}

impl From<InitArg> for InitKind {
    fn from(v: InitArg) -> Self {
        match v {
            InitArg::Random => InitKind::Random,
            InitArg::PerturbedConstant => InitKind::PerturbedConstant,
            InitArg::Zonal => InitKind::Zonal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, env = "SEL_DEGREE", default_value_t = 8)]
    pub degree: usize,
    #[arg(long, env = "SEL_INIT", value_enum, default_value_t = InitArg::Random)]
    pub init: InitArg,
    #[arg(long, env = "SEL_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = "SEL_MAX_ITER", default_value_t = 2000)]
    pub max_iter: usize,
    /// Gradient-norm tolerance on the log-objective scale.
    #[arg(long, env = "SEL_TOL", default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvolutionArgs {
    /// Emit sigma * sigma along a ray instead of its L2 norm.
    #[arg(long)]
    pub profile: bool,
    /// Ray direction, `x,y,z`.
    #[arg(long, env = "SEL_DIRECTION", value_delimiter = ',', default_values_t = [0.0, 0.0, 1.0])]
    pub direction: Vec<f64>,
    /// Profile radii `2 i / points` for `i = 1..=points`.
    #[arg(long, env = "SEL_POINTS", default_value_t = 64)]
    pub points: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Identity(a) => commands::identity(&a),
        Command::Search(a) => commands::search(&a),
        Command::Convolution(a) => commands::convolution(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sel: {e}");
            e.exit_code()
        }
    }
}
