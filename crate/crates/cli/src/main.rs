//! `sicwig`: tomography runs, correlation scans, phase-space enumerations and QKD sessions.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage error, 3 I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sicwig", version, about = "Tetrahedron tomography, discrete Wigner phase space and source-controlled QKD")]
struct Cli {
    /// Directory receiving output files.
    #[arg(long, global = true, env = "SICWIG_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigArg {
    Tt,
    Ta,
}

impl From<ConfigArg> for sicwig::correlations::Configuration {
    fn from(c: ConfigArg) -> Self {
        match c {
            ConfigArg::Tt => Self::Tt,
            ConfigArg::Ta => Self::Ta,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a tomography run and reconstruct the Wigner distribution.
    Tomo(TomoArgs),
    /// Sweep all permutations, configurations and correlation modes.
    ScanCorrelations,
    /// Enumerate qubit and two-qubit phase-point sets and their striations.
    WignerSets,
    /// Run one key distribution session.
    Qkd(QkdArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TomoArgs {
    /// psi-minus | psi-plus | phi-minus | phi-plus | werner:V | file:PATH
    #[arg(long)]
    pub state: String,
    #[arg(long, value_enum, default_value_t = ConfigArg::Tt)]
    pub config: ConfigArg,
    #[arg(long, default_value_t = 40_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Werner visibility applied to the prepared state before measurement.
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QkdArgs {
    #[arg(long, default_value_t = 100_000)]
    pub pairs: u64,
    /// Charles announces his choices (default).
    #[arg(long, conflicts_with = "deny")]
    pub grant: bool,
    /// Charles withholds his choices.
    #[arg(long)]
    pub deny: bool,
    /// Werner visibility of every emitted pair.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ConfigArg::Tt)]
    pub config: ConfigArg,
    /// Fraction of relabeled rounds sacrificed for the tomographic check.
    #[arg(long, default_value_t = 0.25)]
    pub sacrifice: f64,
    /// Fidelity below which the check raises the alarm.
    #[arg(long, default_value_t = sicwig::qkd::DEFAULT_ALARM_THRESHOLD)]
    pub threshold: f64,
}

pub enum Failure {
    Usage(String),
    Io(String),
    Violation(String),
}

impl From<output::IoFailure> for Failure {
    fn from(e: output::IoFailure) -> Self {
        Failure::Io(e.0)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = commands::Context {
        out_dir: cli.out_dir,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Tomo(a) => commands::tomo(&ctx, &a),
        Command::ScanCorrelations => commands::scan_correlations(&ctx),
        Command::WignerSets => commands::wigner_sets(&ctx),
        Command::Qkd(a) => commands::qkd(&ctx, &a),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("I/O error: {m}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Violation(m)) => {
            eprintln!("violation: {m}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}
