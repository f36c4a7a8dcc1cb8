use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use carleman_cli::{run, CliError, Command, Format, JobConfig};
use clap::Parser;

/// Spectral, evolution, scattering and eigenvalue-count jobs for the Carleman operator.
#[derive(Debug, Parser)]
#[command(name = "carleman-scatter", version)]
struct Args {
    command: Command,
    /// JSON job config.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = JobConfig::load(&args.config)?;
    let table = run(&cfg, args.command)?;
    let format = args.format.or(cfg.output.format).unwrap_or_default();
    match args.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table
                .write(format, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
        }
    }
}
