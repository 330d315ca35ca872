use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "minimax-bench", version, about = "Run, sweep and verify first-order minimax solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured solve and print its JSON record
    Solve { config: PathBuf },
    /// Run a grid of solves and print CSV rows
    Sweep { config: PathBuf },
    /// Run an invariant suite: contraction, lemma-lipschitz, moreau, reductions, projections
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = match cli.command {
        Command::Solve { config } => minimax_bench::cmd_solve(&config, &mut out, &mut err),
        Command::Sweep { config } => minimax_bench::cmd_sweep(&config, &mut out, &mut err),
        Command::Verify { suite } => minimax_bench::cmd_verify(&suite, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
