//! `roofsim`: command-line front end for the Roofline models, the cache
//! simulator, the sparse traffic studies and the HPCG mini solver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cmd;
mod error;
mod output;

use error::CliError;
use output::{Format, Output};

#[derive(Debug, Parser)]
#[command(name = "roofsim", version, about = "Roofline models, cache simulation and HPCG-style experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write the result as JSON to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Seed for every randomized input.
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roofline and composite performance predictions.
    Model(cmd::model::ModelArgs),
    /// Cache hit-rate curves for streaming patterns, or a trace file run.
    Simulate(cmd::simulate::SimulateArgs),
    /// Simulated SpMV/SpMPV memory traffic against the minimum-traffic bound.
    SpmvTraffic(cmd::spmv_traffic::SpmvTrafficArgs),
    /// Multigrid-preconditioned CG on the 27-point stencil problem.
    Hpcg(cmd::hpcg::HpcgArgs),
    /// Best-effort wall-clock timing of execute-mode kernels on this host.
    Time(cmd::time::TimeArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = Output {
        format: cli.global.format,
        path: cli.global.output,
        json: cli.global.json,
    };
    let seed = cli.global.seed;
    match cli.command {
        Command::Model(a) => cmd::model::run(a, &out),
        Command::Simulate(a) => cmd::simulate::run(a, &out),
        Command::SpmvTraffic(a) => cmd::spmv_traffic::run(a, &out),
        Command::Hpcg(a) => cmd::hpcg::run(a, seed, &out),
        Command::Time(a) => cmd::time::run(a, seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roofsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
