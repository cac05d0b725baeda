use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pointer_cli::{run, CliError, Command, RunConfig};

/// Pointer-state availability, measurement windows and apparatus classification.
#[derive(Parser, Debug)]
#[command(name = "pointer", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces every seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let threads = match args.threads {
        Some(0) => return Err(CliError::Validation("--threads must be positive".into())),
        Some(n) => Some(n),
        None if args.command.parallel_by_default() => None,
        None => Some(1),
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("cannot start thread pool: {e}")))?;
    }
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.override_seed(seed);
        cfg.validate()?;
    }
    let output = run(args.command, &cfg)?;
    match &args.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))?,
    }
    Ok(!output.failed)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                CliError::Validation(e.to_string().trim_end().to_string()).to_json()
            );
            return ExitCode::from(1);
        }
    };
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "{}",
                CliError::Runtime("one or more checks failed".into()).to_json()
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
