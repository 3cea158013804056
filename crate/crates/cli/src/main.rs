//! Scenario-driven command line for the RIS toolkit.
//!
//! Subcommands mirror the analysis workflows; every run is a pure composition
//! of library calls, reproducible from the config file and seed alone.
//! Exit codes: 0 success, 2 configuration error, 3 numerical error.

mod config;
mod error;
mod table;
mod workflows;

use clap::{Args, Parser, Subcommand};
use config::WorkflowKind;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;
use table::OutputFormat;
use workflows::RunContext;

#[derive(Parser)]
#[command(name = "ris", version, about = "RIS scattering and link-analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coupling-matrix eigenvalue spectrum of a planar array.
    Coupling(RunArgs),
    /// Far-field scattering of a loaded array.
    Scatter(RunArgs),
    /// Fresnel sizing and fractional-bandwidth limits.
    Bandwidth(RunArgs),
    /// Control-overhead rate curves and optimal access gains.
    Overhead(RunArgs),
    /// Multi-route gain sharing Monte Carlo.
    Routing(RunArgs),
    /// Retro-vs-cascaded channel-estimation comparison.
    Estimate(RunArgs),
    /// Run the built-in verification checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output file format.
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Worker threads for sweep points.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed override; wins over the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, workflow) = match &cli.command {
        Command::Coupling(a) => (a, WorkflowKind::Coupling),
        Command::Scatter(a) => (a, WorkflowKind::Scatter),
        Command::Bandwidth(a) => (a, WorkflowKind::Bandwidth),
        Command::Overhead(a) => (a, WorkflowKind::Overhead),
        Command::Routing(a) => (a, WorkflowKind::Routing),
        Command::Estimate(a) => (a, WorkflowKind::Estimate),
        Command::Selftest(s) => {
            let (ok, lines) = workflows::selftest(s.seed);
            for line in lines {
                println!("{line}");
            }
            return if ok {
                println!("selftest: all checks passed");
                ExitCode::SUCCESS
            } else {
                eprintln!("selftest: failures detected");
                ExitCode::from(3)
            };
        }
    };
    match run(args, workflow) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{err}");
            if let CliError::Numerical(_) = err {
                // echo the offending configuration for diagnosis
                if let Ok(text) = std::fs::read_to_string(&args.config) {
                    eprintln!("offending configuration ({}):", args.config.display());
                    eprintln!("{text}");
                }
            }
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(args: &RunArgs, workflow: WorkflowKind) -> Result<Vec<PathBuf>, CliError> {
    // the seed override must land in the hashed effective config
    let file_seed = read_file_seed(&args.config)?;
    let ctx = RunContext {
        seed: args.seed.unwrap_or(file_seed),
        jobs: args.jobs,
        out_dir: args.out.clone(),
        format: args.format,
    };
    workflows::run_from_path(&args.config, &ctx, workflow)
}

fn read_file_seed(path: &PathBuf) -> Result<u64, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: config::ScenarioConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(cfg.seed)
}
