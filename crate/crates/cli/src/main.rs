//! `ptpara` command-line interface.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid configuration,
//! 3 broken PT phase under `--strict`, 4 divergent Green's function.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptpara::{Error, PhysicalParams};

#[derive(Parser, Debug)]
#[command(
    name = "ptpara",
    version,
    about = "Spectrum, propagator and Green's function of the PT-symmetric ring-shaped Coulomb problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Coulomb coupling.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Ring coupling B.
    #[arg(long = "B", global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Imaginary ring coupling C.
    #[arg(long = "C", global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hbar: f64,
    /// Largest n2 + n~2.
    #[arg(long, global = true, default_value_t = 2)]
    pub max_n: u32,
    /// Largest azimuthal number.
    #[arg(long, global = true, default_value_t = 2)]
    pub max_nu: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fail with exit code 3 when a requested sector is in the broken phase.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bound spectrum.
    Spectrum,
    /// Pseudo-time Green's function between two points of (u, v) space.
    Greens(commands::GreensArgs),
    /// Broken/unbroken classification over a (B, C) grid.
    PhaseScan(commands::PhaseScanArgs),
    /// Shooting check of the quantization condition for every level.
    Oracle,
    /// A spherical point in every coordinate representation.
    Transform(commands::TransformArgs),
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    BrokenPhase(String),
    Divergent(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Numerical(_) => 1,
            Failure::Config(_) => 2,
            Failure::BrokenPhase(_) => 3,
            Failure::Divergent(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::BrokenPhase(m) | Failure::Divergent(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        match e {
            Error::InvalidParameter(_)
            | Error::Domain(_)
            | Error::InvalidGrid(_)
            | Error::CoincidentEndpoints
            | Error::Caustic { .. } => Failure::Config(text),
            Error::BrokenPhase { .. } => Failure::BrokenPhase(text),
            Error::DivergentIntegral { .. } => Failure::Divergent(text),
            _ => Failure::Numerical(text),
        }
    }
}

impl Common {
    pub fn params(&self) -> Result<PhysicalParams, Failure> {
        Ok(PhysicalParams::new(self.m, self.hbar, self.alpha, self.b, self.c)?)
    }
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("PTPARA_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!(
                "PTPARA_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = thread_cap()?;
    let common = cli.common;
    let text = ptpara::with_thread_cap(threads, || match &cli.command {
        Command::Spectrum => commands::spectrum(&common),
        Command::Greens(args) => commands::greens(&common, args),
        Command::PhaseScan(args) => commands::phase_scan(&common, args),
        Command::Oracle => commands::oracle(&common),
        Command::Transform(args) => commands::transform(&common, args),
    })?;
    output::emit(&text, common.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ptpara: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
