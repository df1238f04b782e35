//! Command-line entry point.
//!
//! Exit codes: 0 success, 2 configuration validation error, 3 runtime
//! error, 4 acceptance-check failure within an otherwise successful run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diffusionlab_cli::config::{parse_config, ExperimentConfig};
use diffusionlab_cli::output::{write_error_report, OutputDir, Status};
use diffusionlab_cli::schema::RESULTS_SCHEMA;
use diffusionlab_cli::{experiments, Failure};

#[derive(Parser)]
#[command(
    name = "diffusionlab",
    about = "Numerical laboratory for degenerate nonlinear diffusion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for result files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Overrides the config's seed for randomized property sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress the summary line on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Condition checks on a diffusion coefficient.
    AnalyzeCoefficient,
    /// Integrate the initial-boundary value problem.
    Solve,
    /// Integrate and detect propagation into a target ball.
    Front,
    /// Functional decay against envelopes and differential inequalities.
    Stability,
    /// Reproduce the infinite-speed counterexample and its failed condition.
    Counterexample,
    /// Run a parameter grid of stability experiments.
    Sweep,
    /// Print the result-document schema.
    Schema,
}

impl Command {
    fn expected_kind(&self) -> Option<&'static str> {
        match self {
            Command::AnalyzeCoefficient => Some("analyze-coefficient"),
            Command::Solve => Some("solve"),
            Command::Front => Some("front"),
            Command::Stability => Some("stability"),
            Command::Counterexample => Some("counterexample"),
            Command::Sweep => Some("sweep"),
            Command::Schema => None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(status) => match status {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(4),
        },
        Err(failure) => {
            write_error_report(&failure);
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<Status, Failure> {
    let expected = match cli.command.expected_kind() {
        Some(kind) => kind,
        None => {
            // schema subcommand: print, optionally also ship a copy
            println!("{RESULTS_SCHEMA}");
            return Ok(Status::Pass);
        }
    };
    let path = cli.config.as_ref().ok_or_else(|| {
        Failure::validation("--config PATH is required for this subcommand".into(), vec![])
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display()), vec![]))?;
    let mut config: ExperimentConfig = parse_config(&text)?;
    if config.kind_name() != expected {
        return Err(Failure::validation(
            format!("config kind {:?} does not match subcommand {expected:?}", config.kind_name()),
            vec![],
        ));
    }
    if let Some(seed) = cli.seed {
        config.set_seed(seed);
    }
    let out = OutputDir::create(&cli.out)?;
    let doc = experiments::run(&config, &out)?;
    if !cli.quiet {
        let status = match doc.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        println!(
            "{}: status {status}, results in {}",
            config.kind_name(),
            out.root().join("results.json").display()
        );
    }
    Ok(doc.status)
}
