use serde::Serialize;

use super::{HarnessError, ParamSource, RunConfig};
use crate::dynamics::CollectiveParams;
use crate::exec::Execution;
use crate::scenarios::CorrelationReport;

/// `samples` evenly spaced points from 0 to `tau_max`, both included.
pub fn tau_grid(tau_max: f64, samples: usize) -> Vec<f64> {
    let last = (samples - 1) as f64;
    (0..samples).map(|k| if k + 1 == samples { tau_max } else { tau_max * k as f64 / last }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedParams {
    pub params: CollectiveParams,
    pub from_geometry: bool,
    /// `|η|` above the large-shift threshold.
    pub large_shift: bool,
}

pub fn resolve_params(cfg: &RunConfig) -> Result<ResolvedParams, HarnessError> {
    Ok(match cfg.params {
        ParamSource::Direct(p) => ResolvedParams { params: p, from_geometry: false, large_shift: false },
        ParamSource::Geometry(g) => {
            let (params, large_shift) = CollectiveParams::from_geometry(&g)?;
            ResolvedParams { params, from_geometry: true, large_shift }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    #[serde(flatten)]
    pub report: CorrelationReport,
    /// Set in sweep mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// Every `(γ, τ)` point of the run, γ-major; γ is `None` outside sweep mode.
pub(crate) fn points(cfg: &RunConfig) -> Vec<(Option<f64>, f64)> {
    let taus = tau_grid(cfg.tau_max, cfg.samples);
    match &cfg.sweep {
        None => taus.iter().map(|&t| (None, t)).collect(),
        Some(gammas) => gammas.iter().flat_map(|&g| taus.iter().map(move |&t| (Some(g), t))).collect(),
    }
}

/// One row per τ sample (per sweep value in sweep mode), in grid order.
pub fn run_scenario(cfg: &RunConfig, exec: Execution) -> Result<Vec<SeriesRow>, HarnessError> {
    let resolved = resolve_params(cfg)?;
    let p = resolved.params;
    let pts = points(cfg);
    exec.map(&pts, |&(g, tau)| {
        let report = cfg.scenario.correlations(g.unwrap_or(p.gamma), p.eta, tau)?;
        Ok(SeriesRow { report, gamma: g })
    })
    .into_iter()
    .collect()
}
