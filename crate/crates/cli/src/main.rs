use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qkm_cli::{curve_record, load_curve, run, CliError, Outcome, RunConfig, Stage};

#[derive(Parser)]
#[command(name = "qkm", version, about = "Spectral curve, correlator and check pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` of the config
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stored curve JSON to use instead of solving the model
    #[arg(long, global = true)]
    curve: Option<PathBuf>,
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the spectral curve and write curve.json
    Curve,
    /// Evaluate the omega tasks
    Omega,
    /// Run the verify tasks
    Verify,
    /// Compare the two planar routes for the oracle tasks
    Oracle,
    /// All tasks in order
    Run,
    /// Rewrite a stored curve JSON in canonical form with derived data
    Export,
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let stored = cli.curve.as_deref().map(load_curve).transpose()?;
    if let Command::Export = cli.command {
        let curve = stored.ok_or_else(|| CliError::ConfigInvalid("export needs --curve".into()))?;
        let out = cli.out.clone().ok_or_else(|| CliError::ConfigInvalid("export needs --out".into()))?;
        let mut o = Outcome::default();
        o.artifacts.insert("curve.json".into(), curve_record(&curve).to_json() + "\n");
        return o.write(&out);
    }
    let path = cli.config.as_deref().ok_or_else(|| CliError::ConfigInvalid("--config is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let only = match cli.command {
        Command::Curve => Some(Stage::Curve),
        Command::Omega => Some(Stage::Omega),
        Command::Verify => Some(Stage::Verify),
        Command::Oracle => Some(Stage::Oracle),
        _ => None,
    };
    let outcome = run(&cfg, only, stored, cli.verbose)?;
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    outcome.write(&dir)?;
    println!("{} checks, {} failed; artifacts in {}", outcome.checks_total, outcome.checks_failed, dir.display());
    outcome.status()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
