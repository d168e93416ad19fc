//! `adqec`: level maps, channel ensembles, Monte Carlo estimates and
//! critical noise parameters for concatenated stabilizer codes.
//!
//! Exit status: 0 on success, 1 when a computation fails or reproduced
//! values disagree with the reference, 2 on invalid usage.

mod commands;
mod config;
mod output;
mod reproduce;

use std::process::ExitCode;

use adaptive_qec::QecError;
use clap::{Parser, Subcommand};

use crate::config::CommonArgs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<QecError> for CliError {
    fn from(e: QecError) -> Self {
        commands::classify(&e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "adqec", version, about = "Adaptive concatenation of stabilizer codes under Pauli noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy of a noise channel, raw (--levels 0) or after adaptive
    /// concatenation.
    Entropy,
    /// Per-syndrome logical channels of one code level under uniform noise.
    LevelMap,
    /// Exact ensemble of conditional channels after --levels levels.
    Ensemble,
    /// Monte Carlo entropy estimate after --levels levels.
    Mc,
    /// Critical noise parameter per level, or the unoptimized threshold.
    Threshold {
        /// Threshold of the iterated blind map instead of the adaptive
        /// entropy crossing.
        #[arg(long)]
        unoptimized: bool,
    },
    /// Recompute the reference critical-value tables and compare.
    Reproduce {
        /// Also run the level-3 and level-4 cells (slow).
        #[arg(long)]
        mc: bool,
    },
    /// List the builtin codes.
    Codes,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = cli.common.resolve()?;
    if let Some(t) = cfg.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let dry = cli.common.dry_run;
    let (report, ok) = match cli.command {
        Command::Entropy => (commands::entropy_cmd(&mut cfg, dry)?, true),
        Command::LevelMap => (commands::level_map_cmd(&mut cfg, dry)?, true),
        Command::Ensemble => (commands::ensemble_cmd(&mut cfg, dry)?, true),
        Command::Mc => (commands::mc_cmd(&mut cfg, dry)?, true),
        Command::Threshold { unoptimized } => {
            cfg.unoptimized |= unoptimized;
            (commands::threshold_cmd(&mut cfg, dry)?, true)
        }
        Command::Reproduce { mc } => {
            cfg.mc_cells |= mc;
            reproduce::reproduce(&cfg, dry)?
        }
        Command::Codes => (commands::codes_cmd(&mut cfg)?, true),
    };
    report.emit()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("adqec: some values differ from the reference");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("adqec: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("adqec: {m}");
            ExitCode::from(1)
        }
    }
}
