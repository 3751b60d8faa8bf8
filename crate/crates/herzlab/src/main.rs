use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use herzlab::{run_config, Command};

#[derive(Debug, Parser)]
#[command(name = "herzlab", version, about = "Mixed-norm Herz space experiments")]
struct Args {
    /// Computation to run.
    #[arg(value_enum)]
    command: Command,
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `[output] path`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_config(args.command, &args.config, args.out.as_deref(), args.seed) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("herzlab {}: {e}", args.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
