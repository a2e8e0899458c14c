use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use replichain::runner::config::Mode;
use replichain::runner::{run, RunError, RunOptions};

#[derive(Parser)]
#[command(version, about = "Entanglement replication between two XX chains driven by Bell pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the correlation matrix and record observables
    Simulate(Common),
    /// Solve for the stationary state
    Steady(Common),
    /// Steady-state protocol over a grid of gamma or mu
    Sweep(Common),
    /// Entanglement length, current and convergence exponents at one point
    Analyze(Common),
    /// Check the simulations against closed-form predictions
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, common) = match cli.command {
        Command::Simulate(c) => (Mode::Simulate, c),
        Command::Steady(c) => (Mode::Steady, c),
        Command::Sweep(c) => (Mode::Sweep, c),
        Command::Analyze(c) => (Mode::Analyze, c),
        Command::Validate(c) => (Mode::Validate, c),
    };
    // sweeps parallelize across points; keep each point's linear algebra serial
    faer::set_global_parallelism(faer::Par::Seq);
    let options = RunOptions {
        config: common.config,
        out: common.out,
        threads: common.threads,
        quiet: common.quiet,
    };
    match run(mode, &options) {
        Ok(manifest) => {
            if !options.quiet {
                eprintln!("wrote {} file(s), manifest in place", manifest.files.len());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let RunError::Validation(report) = &e {
                for c in report.failed() {
                    eprintln!("  {}: deviation {:e} > tolerance {:e}", c.name, c.deviation, c.tolerance);
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
