//! Batch front end for `herzlab-core`: reads a TOML experiment description,
//! runs one command and writes a CSV or JSON report.

use std::fmt;
use std::path::Path;

pub mod commands;
pub mod config;
pub mod report;

pub use commands::run;
pub use config::{Command, ExperimentConfig, Format};
pub use report::{Record, Report, Value};

#[derive(Debug)]
pub enum CliError {
    /// The configuration is malformed or incomplete.
    Config(String),
    /// The library refused the request.
    Core(herzlab_core::Error),
    /// Anything else that went wrong while running or writing.
    Run(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Run(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<herzlab_core::Error> for CliError {
    fn from(e: herzlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Loads `path`, runs `command` and writes the report to `out` (or the
/// config's `[output] path`, or stdout).
pub fn run_config(command: Command, path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Report, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    let report = run(command, &cfg, seed)?;
    let output = cfg.output.as_ref();
    let format = output.map(|o| o.format).unwrap_or_default();
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| output.and_then(|o| o.path.as_ref()).map(|p| cfg.resolve(p)));
    report.emit(format, target.as_deref())?;
    Ok(report)
}
