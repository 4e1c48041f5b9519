use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unsflow_cli::{execute, Command, ExperimentSpec, VERSION};

#[derive(Debug, Parser)]
#[command(name = "unsflow", version = VERSION, about = "Unconstrained Navier-Stokes experiments on a staggered channel grid")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "UNSFLOW_OUT", default_value = "out")]
    out: PathBuf,
    /// Override a configuration entry, e.g. `--set physics.nu=0.05`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for every random field.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Time-step the configured flow and write diagnostics and final fields.
    Run(Common),
    /// Project seeded random fields and report the projection identities.
    Project(Common),
    /// Empirical domination constant of the Stokes pressure.
    Beta(Common),
    /// Eigenvalues of the unconstrained Stokes operator.
    Spectrum(Common),
    /// Manufactured-solution convergence study.
    Mms(Common),
    /// Divergence decay rate of the configured run.
    Decay(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Sub::Run(c) => (Command::Run, c),
        Sub::Project(c) => (Command::Project, c),
        Sub::Beta(c) => (Command::Beta, c),
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Mms(c) => (Command::Mms, c),
        Sub::Decay(c) => (Command::Decay, c),
    };
    let spec = ExperimentSpec { command, config: common.config, out: common.out, overrides: common.overrides, seed: common.seed };
    match execute(&spec) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
