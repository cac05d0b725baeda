//! Library side of the `pointer` command: configuration, commands and output
//! formatting. The binary only parses arguments and writes the result.

pub mod commands;
pub mod config;
pub mod error;

use clap::ValueEnum;

pub use commands::Output;
pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Simulate,
    Windows,
    Classify,
    OracleCheck,
    Sweep,
    Info,
}

impl Command {
    /// Commands that parallelize by default; the rest run on one thread
    /// unless `--threads` is given.
    pub fn parallel_by_default(self) -> bool {
        matches!(self, Command::Sweep)
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    match command {
        Command::Simulate => commands::simulate(cfg),
        Command::Windows => commands::windows(cfg),
        Command::Classify => commands::classify(cfg),
        Command::OracleCheck => commands::oracle_check(cfg),
        Command::Sweep => commands::sweep(cfg),
        Command::Info => commands::info(cfg),
    }
}

/// Shortest decimal text that parses back to the same `f64`. Plain notation
/// for moderate magnitudes, scientific otherwise.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
