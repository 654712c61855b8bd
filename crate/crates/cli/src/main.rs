use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use slabtherm_cli::commands::{self, SweepKind};
use slabtherm_cli::config::RunConfig;
use slabtherm_cli::{load_configs, CliError};

#[derive(Parser)]
#[command(name = "slabtherm", version, about = "Thermalization of an atom near a hot or cold dielectric slab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (`key = value` or JSON); repeat to layer overrides.
    #[arg(long, global = true)]
    config: Vec<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Override `quadrature.rel_tol`.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline at one parameter point, as JSON.
    Point,
    /// One- or two-axis parameter sweep, as CSV.
    Sweep {
        #[arg(long, value_enum, default_value_t = Kind::Full)]
        kind: Kind,
    },
    /// Density-matrix time series, as CSV.
    Evolve,
    /// Half-space thickness criterion, as JSON.
    Criterion,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Full,
    Branch,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if cli.config.is_empty() {
        return Err(CliError::Config("no --config given".into()));
    }
    let mut raw = load_configs(&cli.config)?;
    if let Some(tol) = cli.rel_tol {
        raw.set("quadrature.rel_tol", tol.to_string());
    }
    match cli.command {
        Command::Point => commands::point_json(&raw),
        Command::Sweep { kind } => {
            let kind = match kind {
                Kind::Full => SweepKind::Full,
                Kind::Branch => SweepKind::Branch,
            };
            let out = commands::sweep(&raw, kind, cli.jobs)?;
            if out.failed > 0 {
                emit(cli, &out.csv)?;
                let total = out.csv.lines().count() - 1;
                return Err(CliError::RowsFailed {
                    failed: out.failed,
                    total,
                });
            }
            Ok(out.csv)
        }
        Command::Evolve => commands::evolve_csv(&RunConfig::from_raw(&raw)?),
        Command::Criterion => commands::criterion_json(&RunConfig::from_raw(&raw)?),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| emit(&cli, &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slabtherm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
