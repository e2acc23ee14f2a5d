//! Command-line front end: configuration, time series, sweeps and
//! cross-checks.

pub mod config;
pub mod crosscheck;
pub mod output;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_config, OutputFormat, ParamSource, RunConfig, Tolerances};
pub use crosscheck::{cross_check, CrossCheckReport, CrossCheckRow, Offender};
pub use run::{resolve_params, run_scenario, tau_grid, ResolvedParams, SeriesRow};

use crate::dynamics::DynamicsError;
use crate::measures::MeasureError;
use crate::scenarios::ScenarioError;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Cli(clap::Error),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CROSS_CHECK: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => EXIT_CONFIG,
            _ => EXIT_DOMAIN,
        }
    }
}

/// Runs a parsed configuration end to end, writing to `--out` or stdout.
/// Returns the process exit code.
pub fn execute(cfg: &RunConfig, exec: crate::exec::Execution) -> Result<i32, HarnessError> {
    use std::io::Write;

    let resolved = resolve_params(cfg)?;
    if resolved.large_shift {
        eprintln!("warning: |eta| = {:e} is very large; the atoms are far inside the near field", resolved.params.eta);
    }
    let meta = output::RunMeta {
        scenario: output::scenario_name(cfg.scenario.kind),
        near_zero_separation: cfg.scenario.near_zero_separation,
        gamma: cfg.sweep.is_none().then(|| cfg.scenario.effective_gamma(resolved.params.gamma)),
        eta: resolved.params.eta,
        from_geometry: resolved.from_geometry,
        sweep: cfg.sweep.is_some(),
    };
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };
    let code = if cfg.cross_check {
        let report = cross_check(cfg, exec)?;
        output::write_cross_check(&mut sink, &meta, &report, cfg.format)?;
        eprintln!("{}", output::verdict_line(&report));
        if report.pass {
            EXIT_OK
        } else {
            EXIT_CROSS_CHECK
        }
    } else {
        let rows = run_scenario(cfg, exec)?;
        output::write_series(&mut sink, &meta, &rows, cfg.format)?;
        EXIT_OK
    };
    sink.flush()?;
    Ok(code)
}
