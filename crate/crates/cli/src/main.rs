//! `kitaev`: spectra, Z tables and figure data for the Kitaev chain.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error.

mod commands;
mod grid;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kitaev_core::correlations::EigenTarget;
use kitaev_core::quadratic::Boundary;
use kitaev_core::KitaevError;

use grid::Grid;
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "kitaev", version, about = "Kitaev chain eigenstates as tensor chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-body energies and ground-state energy of one chain.
    Spectrum(SpectrumArgs),
    /// Saturated edge correlation Z over a (μ, 2w) grid.
    Zscan(ZscanArgs),
    /// Tensor-chain energy against −Σε/2 over a (μ, w) grid.
    EnergyAccuracy(SurfaceArgs),
    /// Mean particle number and ground-state parity over a (μ, w) grid.
    Particles(SurfaceArgs),
    /// Compares everything against exact diagonalization on short chains.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    Ground,
    FirstExcited,
}

impl From<TargetArg> for EigenTarget {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Ground => EigenTarget::Ground,
            TargetArg::FirstExcited => EigenTarget::FirstExcited,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub w: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Pairing phase; only 0 is supported.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ZscanArgs {
    /// Chemical potentials, `start:stop:step` or a comma list.
    #[arg(long, default_value = "-4:4:1", allow_hyphen_values = true)]
    pub mu: Grid,
    /// Values of 2w.
    #[arg(long, default_value = "-4:4:1", allow_hyphen_values = true)]
    pub two_w: Grid,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Open chains only.
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    /// Chain lengths to sweep.
    #[arg(long, default_value = "8:96:8", value_parser = grid::parse_schedule)]
    pub n_schedule: std::vec::Vec<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = 1e-12)]
    pub trunc: f64,
    #[arg(long, value_enum, default_value_t = TargetArg::Ground)]
    pub target: TargetArg,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value = "-4:4:0.5", allow_hyphen_values = true)]
    pub mu: Grid,
    #[arg(long, default_value = "-2:2:0.25", allow_hyphen_values = true)]
    pub w: Grid,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 1e-12)]
    pub trunc: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// At most 8 sites.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value = "-3:3:1", allow_hyphen_values = true)]
    pub mu: Grid,
    #[arg(long, default_value = "-1.5:1.5:0.5", allow_hyphen_values = true)]
    pub w: Grid,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = 1e-12)]
    pub trunc: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

impl From<KitaevError> for Failure {
    fn from(e: KitaevError) -> Self {
        match e {
            KitaevError::InvalidParams(_) | KitaevError::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Zscan(a) => commands::zscan(a),
        Command::EnergyAccuracy(a) => commands::energy_accuracy(a),
        Command::Particles(a) => commands::particles(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
