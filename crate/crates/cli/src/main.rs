use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockfluct_cli::config::Experiment;
use fockfluct_cli::{RunOptions, EXIT_CONFIG};

/// Number-fluctuation experiments on truncated bosonic Fock spaces.
#[derive(Parser)]
#[command(name = "fockfluct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Planck statistics over a grid of beta*omega
    Thermal(RunOptions),
    /// Two-mode states sharing N quanta, over an (a, N) grid
    Bipartite(RunOptions),
    /// Pair correlation, bunching and subvolume variance on a momentum ring
    Multimode(RunOptions),
    /// Closed forms against the dense oracle
    Verify(RunOptions),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let (experiment, options) = match cli.command {
        Command::Thermal(o) => (Experiment::Thermal, o),
        Command::Bipartite(o) => (Experiment::Bipartite, o),
        Command::Multimode(o) => (Experiment::Multimode, o),
        Command::Verify(o) => (Experiment::Verify, o),
    };
    match fockfluct_cli::execute(experiment, &options) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fockfluct: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
