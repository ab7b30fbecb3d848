//! `idlaw`: evaluate, transform, verify and simulate infinitely divisible laws.
//!
//! Exit codes: 0 on success or a passing check, 1 when a check fails or
//! quadrature does not converge, 2 on usage or input errors.

mod commands;
mod output;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idlaw_core::{IdLawError, QuadConfig};

#[derive(Debug, Parser)]
#[command(name = "idlaw", version, about = "Infinitely divisible laws and random integral mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a characteristic exponent, optionally after a mapping.
    Eval(EvalArgs),
    /// Write the Lévy triplet of the J^β image of a law.
    Transform(TransformArgs),
    /// Check one identity on a law and report pointwise residuals.
    Verify(VerifyArgs),
    /// Draw samples of a random integral, or compare them with quadrature.
    Simulate(SimulateArgs),
    /// Conditional stochastic area: factor check and cosh/coth comparison.
    AreaDemo(AreaArgs),
    /// Run a batch of checks from a config file (or the built-in default).
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Jbeta,
    I,
    Ubetaf,
    Ijbeta,
}

impl MapName {
    fn as_str(self) -> &'static str {
        match self {
            MapName::Jbeta => "jbeta",
            MapName::I => "i",
            MapName::Ubetaf => "ubetaf",
            MapName::Ijbeta => "ijbeta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
pub enum Identity {
    #[value(name = "eq3")]
    #[serde(rename = "eq3")]
    Eq3,
    #[value(name = "eq15")]
    #[serde(rename = "eq15")]
    Eq15,
    #[value(name = "cor1a")]
    #[serde(rename = "cor1a")]
    Cor1a,
    #[value(name = "cor5")]
    #[serde(rename = "cor5")]
    Cor5,
    #[value(name = "prop2")]
    #[serde(rename = "prop2")]
    Prop2,
    #[value(name = "eq2-timechange")]
    #[serde(rename = "eq2-timechange")]
    Eq2Timechange,
    #[value(name = "area")]
    #[serde(rename = "area")]
    Area,
}

impl Identity {
    pub fn as_str(self) -> &'static str {
        match self {
            Identity::Eq3 => "eq3",
            Identity::Eq15 => "eq15",
            Identity::Cor1a => "cor1a",
            Identity::Cor5 => "cor5",
            Identity::Prop2 => "prop2",
            Identity::Eq2Timechange => "eq2-timechange",
            Identity::Area => "area",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    law: PathBuf,
    #[arg(long, value_enum)]
    map: Option<MapName>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Evaluation points; for d > 1 consecutive groups of d values form one point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    y: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    law: PathBuf,
    #[arg(long, value_enum, default_value = "jbeta")]
    map: MapName,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    identity: Identity,
    /// Required for every identity except `area`.
    #[arg(long)]
    law: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Grid override; radii for `cor5`, `t` values for `area`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    #[arg(long, default_value_t = 200_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Conditioning time for `area`.
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimReport {
    /// One CSV row per sample.
    Samples,
    /// Empirical characteristic function with standard errors.
    Ecf,
    /// Empirical CF against the quadrature exponent, with z-scores.
    Compare,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    law: PathBuf,
    #[arg(long, value_enum, default_value = "jbeta")]
    map: MapName,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 200_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "s-max", default_value_t = idlaw_core::simulate::DEFAULT_S_MAX)]
    s_max: f64,
    /// Thread count; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "samples")]
    report: SimReport,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    /// z-score threshold for `--report compare`.
    #[arg(long = "z-max", default_value_t = 4.0)]
    z_max: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AreaArgs {
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// `t` grid; defaults to 0.1, 0.2, …, 5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// JSON config; the built-in default runs every identity on four laws.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the config Monte Carlo sample count.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// How a command ended, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass.
    Check(String),
    /// Bad arguments, unreadable or malformed input.
    Input(String),
    /// Numerical failure while evaluating.
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) | Failure::Numeric(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Input(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<IdLawError> for Failure {
    fn from(e: IdLawError) -> Self {
        match e {
            IdLawError::QuadratureFailed { .. } => Failure::Numeric(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Quadrature settings; `IDLAW_QUAD_TOL` replaces both the absolute and the
/// relative tolerance.
pub fn quad_config() -> CliResult<QuadConfig> {
    let cfg = QuadConfig::default();
    match std::env::var("IDLAW_QUAD_TOL") {
        Err(_) => Ok(cfg),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(QuadConfig { rel_tol: t, ..cfg.with_abs_tol(t) }),
            _ => Err(Failure::Input(format!("IDLAW_QUAD_TOL = '{raw}' is not a positive number"))),
        },
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::AreaDemo(a) => commands::area_demo(a),
        Command::Suite(a) => suite::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("idlaw: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
