//! Library surface of the `confusion-bounds` command-line tool: CSV and
//! config ingestion, command execution, and report emission. The binary
//! in `main.rs` is a thin wrapper so integration tests can drive the
//! same code in-process.

pub mod commands;
pub mod csv;
pub mod error;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{
    cmd_binary_bound, cmd_bound, cmd_validate, render_json, render_trials_csv, trials_csv_path,
    ValidateOverrides,
};
use confusion_bounds::validation::Harness;
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "confusion-bounds",
    version,
    about = "Confusion-matrix generalization bounds for multiclass ensembles, \
             with seeded validation harnesses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the multiclass deviation, norm, and majority-vote bounds
    /// from CSV inputs.
    Bound(BoundArgs),
    /// Compute the two-class divergence risk bound from CSV inputs.
    BinaryBound(BoundArgs),
    /// Run a validation harness described by a TOML config file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Sample CSV: rows `example_id,label` (labels 1-based).
    #[arg(long)]
    pub sample: PathBuf,
    /// Predictions CSV: header `example_id,f1,...,fn`, one label column
    /// per classifier.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Prior weights CSV: rows `classifier_id,weight`.
    #[arg(long)]
    pub prior: PathBuf,
    /// Posterior weights CSV: rows `classifier_id,weight`.
    #[arg(long)]
    pub posterior: PathBuf,
    /// Confidence parameter in (0, 1].
    #[arg(long)]
    pub delta: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// TOML simulation config.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's harness
    /// (theorem2 | theorem1-binary | concentration | prop1).
    #[arg(long)]
    pub harness: Option<String>,
    /// Override the config's trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the config's delta.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Write the JSON report here (and the per-trial CSV next to it as
    /// `<stem>.trials.csv`) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stdout format when --out is not given: the JSON report or the
    /// per-trial CSV.
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

fn parse_harness(name: &str) -> Result<Harness, CliError> {
    match name {
        "theorem2" => Ok(Harness::Theorem2),
        "theorem1-binary" => Ok(Harness::Theorem1Binary),
        "concentration" => Ok(Harness::Concentration),
        "prop1" => Ok(Harness::Prop1),
        other => Err(CliError::Parameter(format!(
            "unknown harness '{other}'; expected theorem2, theorem1-binary, concentration, or prop1"
        ))),
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Execute a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Bound(args) => {
            let output = cmd_bound(
                &args.sample,
                &args.predictions,
                &args.prior,
                &args.posterior,
                args.delta,
            )?;
            emit(&render_json(&output)?, args.out.as_deref())?;
            Ok(0)
        }
        Command::BinaryBound(args) => {
            let output = cmd_binary_bound(
                &args.sample,
                &args.predictions,
                &args.prior,
                &args.posterior,
                args.delta,
            )?;
            emit(&render_json(&output)?, args.out.as_deref())?;
            Ok(0)
        }
        Command::Validate(args) => {
            let overrides = ValidateOverrides {
                harness: args.harness.as_deref().map(parse_harness).transpose()?,
                trials: args.trials,
                seed: args.seed,
                delta: args.delta,
            };
            let output = cmd_validate(&args.config, &overrides)?;
            let json = render_json(&output)?;
            match &args.out {
                Some(path) => {
                    write_output(path, &json)?;
                    write_output(&trials_csv_path(path), &render_trials_csv(&output))?;
                }
                None => match args.format {
                    OutputFormat::Json => println!("{json}"),
                    OutputFormat::Csv => print!("{}", render_trials_csv(&output)),
                },
            }
            Ok(if output.report.passed() { 0 } else { 1 })
        }
    }
}

fn emit(contents: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_output(path, contents),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}
