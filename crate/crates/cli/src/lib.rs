//! Experiment runner behind the `fockfluct` binary.
//!
//! Each subcommand reads an optional JSON config, applies command-line overrides, runs its
//! grid in parallel and writes one deterministic CSV or JSON report.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use config::{BipartiteParams, Experiment, ExperimentConfig, Format, MultimodeParams, ThermalParams, VerifyParams};
use output::Report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_VERIFY_FAILED: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fockfluct_core::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(fockfluct_core::Error::Capacity { .. }) => EXIT_CAPACITY,
            _ => EXIT_CONFIG,
        }
    }
}

/// Flags shared by every subcommand. Command-line values win over the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunOptions {
    /// JSON experiment config
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized checks
    #[arg(long)]
    pub seed: Option<u64>,
    /// Thermal truncation tolerance
    #[arg(long, value_name = "REAL")]
    pub tail_tol: Option<f64>,
}

/// A finished run, before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: Report,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub failed: usize,
    pub skipped: usize,
}

impl Run {
    pub fn exit_code(&self) -> u8 {
        if self.failed > 0 {
            EXIT_VERIFY_FAILED
        } else {
            EXIT_OK
        }
    }
}

fn echo<T: Serialize>(params: &T) -> Value {
    serde_json::to_value(params).expect("parameters serialize to JSON")
}

pub fn run(experiment: Experiment, options: &RunOptions) -> Result<Run, CliError> {
    let config = match &options.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(declared) = config.experiment {
        if declared != experiment {
            return Err(CliError::Config(format!(
                "config is for the {declared} experiment, not {experiment}"
            )));
        }
    }
    if options.tail_tol.is_some() && experiment != Experiment::Thermal {
        return Err(CliError::Config(
            "--tail-tol only applies to the thermal experiment".into(),
        ));
    }
    let seed = options.seed.or(config.seed).unwrap_or(0);
    let output = options.output.clone().or(config.output.path.clone());
    let format = options
        .format
        .or(config.output.format)
        .or_else(|| match output.as_ref()?.extension()?.to_str()? {
            "json" => Some(Format::Json),
            _ => None,
        })
        .unwrap_or(Format::Csv);

    let (parameters, tables, failed, skipped) = match experiment {
        Experiment::Thermal => {
            let mut params: ThermalParams = config::parameters(&config.parameters)?;
            if let Some(tol) = options.tail_tol {
                params.tail_tol = tol;
            }
            (echo(&params), experiments::run_thermal(&params)?, 0, 0)
        }
        Experiment::Bipartite => {
            let params: BipartiteParams = config::parameters(&config.parameters)?;
            (echo(&params), experiments::run_bipartite(&params)?, 0, 0)
        }
        Experiment::Multimode => {
            let params: MultimodeParams = config::parameters(&config.parameters)?;
            (echo(&params), experiments::run_multimode(&params)?, 0, 0)
        }
        Experiment::Verify => {
            let params: VerifyParams = config::parameters(&config.parameters)?;
            let outcome = verify::run_verify(&params, seed)?;
            (echo(&params), outcome.tables, outcome.failed, outcome.skipped)
        }
    };
    let echoed = serde_json::json!({
        "experiment": experiment,
        "parameters": parameters,
        "output": { "format": format },
        "seed": seed,
    });
    Ok(Run {
        report: Report {
            experiment,
            seed,
            config: echoed,
            tables,
        },
        format,
        output,
        failed,
        skipped,
    })
}

/// Runs, writes the report and returns the process exit code.
pub fn execute(experiment: Experiment, options: &RunOptions) -> Result<u8, CliError> {
    let run = run(experiment, options)?;
    let text = run.report.render(run.format)?;
    match &run.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        })?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                context: "writing standard output".into(),
                source,
            })?,
    }
    if experiment == Experiment::Verify {
        eprintln!(
            "verify: {} failed, {} skipped{}",
            run.failed,
            run.skipped,
            if run.failed > 0 {
                ""
            } else {
                ", all compared values agree"
            }
        );
    }
    Ok(run.exit_code())
}
