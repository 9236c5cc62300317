use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomech_cli::config::{Convention, Format};
use optomech_cli::{emit, load_config, report, sweep, verify, CliError};

#[derive(Parser)]
#[command(name = "optomech", version, about = "Quantum limits of multicarrier optomechanical sensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; overrides the scenario's output path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    convention: Option<Convention>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the requested bounds across the frequency sweep.
    Sweep { config: PathBuf },
    /// Report optimal couplings, powers and angles at one frequency.
    Optimum {
        config: PathBuf,
        /// Sideband angular frequency, rad/s.
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Cross-check closed forms against the full-state oracle and search for
    /// multi-carrier configurations beating the best single carrier.
    Verify { config: PathBuf },
}

fn write_text(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            context: format!("cannot write {}", p.display()),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config } => {
            let cfg = load_config(&config)?;
            let mut spec = cfg.output.clone();
            if let Some(p) = cli.output {
                spec.path = Some(p);
            }
            if let Some(f) = cli.format {
                spec.format = f;
            }
            if let Some(c) = cli.convention {
                spec.convention = c;
            }
            let rows = sweep::run_sweep(&cfg, spec.convention)?;
            let labels: Vec<String> = cfg.columns()?.into_iter().map(|c| c.label).collect();
            for row in rows.iter().filter(|r| r.diagnostic.is_some()) {
                eprintln!("warning: omega={:e}: {}", row.omega, row.diagnostic.as_deref().unwrap_or(""));
            }
            emit::emit(&rows, &labels, &spec)
        }
        Command::Optimum { config, omega } => {
            let cfg = load_config(&config)?;
            let omega = omega.or(cfg.optimum_omega).ok_or_else(|| {
                CliError::Validation("no frequency: pass --omega or set optimum_omega".into())
            })?;
            let rep = report::report_optimum(&cfg, omega)?;
            write_text(&rep.to_string(), cli.output.as_ref())
        }
        Command::Verify { config } => {
            let cfg = load_config(&config)?;
            let rep = verify::run_verify(&cfg)?;
            write_text(&rep.to_string(), cli.output.as_ref())?;
            if rep.passed() {
                Ok(())
            } else {
                Err(CliError::Numerical("verification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
