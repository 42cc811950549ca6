use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracemax_cli::{cmd_compare_init, cmd_generate, cmd_run, GenArgs, SolverArgs, SourceArgs};

#[derive(Parser)]
#[command(name = "tracemax", version, about = "Jacobi-type trace maximization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random tensor (and its true diagonal, if any) to disk.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one solver; writes `<out>.csv` and `<out>.json`.
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run identity and HOSVD initialization on the same tensor.
    CompareInit {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate { gen, out } => cmd_generate(gen, out).map(|()| 0),
        Command::Run { source, solver, out } => cmd_run(source, solver, out),
        Command::CompareInit { source, solver, out } => cmd_compare_init(source, solver, out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("tracemax: {e:#}");
            ExitCode::from(1)
        }
    }
}
