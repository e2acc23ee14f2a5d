//! Closed forms against three independent routes: the generic measures on
//! the same state, the RK4-integrated master equation, and brute-force
//! searches on a subsample of rows.

use serde::Serialize;

use super::run::resolve_params;
use super::{tau_grid, HarnessError, RunConfig, Tolerances};
use crate::dynamics::{integrate_rk4, CollectiveParams};
use crate::exec::Execution;
use crate::linalg::max_abs_diff;
use crate::measures::{lqu_bruteforce, tqd_bruteforce, LquGrid, TqdBudget};
use crate::qstate::{DensityMatrix, XState};
use crate::scenarios::{generic_report, state_via_dynamics, CorrelationReport, Scenario};

/// Most rows per series that get the brute-force searches.
pub const BRUTEFORCE_ROWS: usize = 11;

/// Weight outside the X pattern tolerated in the RK4 state.
const RK4_X_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheckRow {
    #[serde(flatten)]
    pub closed: CorrelationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Largest entry deviation from the state reached through the Dicke-basis
    /// dynamics.
    pub state_dev_dynamics: f64,
    /// Largest entry deviation from the RK4 state.
    pub state_dev_rk4: f64,
    pub concurrence_generic: f64,
    pub tqd_generic: f64,
    pub lqu_generic: f64,
    pub concurrence_rk4: f64,
    pub tqd_rk4: f64,
    pub lqu_rk4: f64,
    pub tqd_bruteforce: Option<f64>,
    pub lqu_bruteforce: Option<f64>,
    pub pass: bool,
}

impl CrossCheckRow {
    /// `(check, deviation, tolerance)` for every comparison made on this row.
    pub fn deviations(&self, tol: &Tolerances) -> Vec<(&'static str, f64, f64)> {
        let c = &self.closed;
        let mut out = vec![
            ("state-dynamics", self.state_dev_dynamics, tol.generic),
            ("concurrence-generic", (c.concurrence - self.concurrence_generic).abs(), tol.generic),
            ("tqd-generic", (c.tqd - self.tqd_generic).abs(), tol.generic),
            ("lqu-generic", (c.lqu - self.lqu_generic).abs(), tol.generic),
            ("state-rk4", self.state_dev_rk4, tol.rk4),
            ("concurrence-rk4", (c.concurrence - self.concurrence_rk4).abs(), tol.rk4),
            ("tqd-rk4", (c.tqd - self.tqd_rk4).abs(), tol.rk4),
            ("lqu-rk4", (c.lqu - self.lqu_rk4).abs(), tol.rk4),
        ];
        if let Some(v) = self.tqd_bruteforce {
            out.push(("tqd-bruteforce", (c.tqd - v).abs(), tol.bruteforce));
        }
        if let Some(v) = self.lqu_bruteforce {
            out.push(("lqu-bruteforce", (c.lqu - v).abs(), tol.bruteforce));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Offender {
    pub check: &'static str,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
    pub pass: bool,
    /// Comparison with the largest deviation relative to its tolerance.
    pub worst: Option<Offender>,
}

/// Row indices that get the brute-force searches: all of them for short
/// series, otherwise [`BRUTEFORCE_ROWS`] evenly spaced ones.
pub fn bruteforce_rows(n: usize) -> Vec<usize> {
    if n <= BRUTEFORCE_ROWS {
        return (0..n).collect();
    }
    let last = BRUTEFORCE_ROWS - 1;
    let mut v: Vec<usize> = (0..=last).map(|k| (k * (n - 1) + last / 2) / last).collect();
    v.dedup();
    v
}

fn rk4_series(
    scenario: Scenario,
    p: CollectiveParams,
    taus: &[f64],
    per_unit: usize,
) -> Result<Vec<DensityMatrix>, HarnessError> {
    let mut rho = state_via_dynamics(scenario.kind, p.gamma, p.eta, 0.0)?.to_density();
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let dt = tau - prev;
        if dt > 0.0 {
            let steps = ((per_unit as f64 * dt).ceil() as usize).max(1);
            rho = integrate_rk4(&rho, &p, dt, steps);
        }
        prev = tau;
        out.push(rho.clone());
    }
    Ok(out)
}

fn check_point(
    cfg: &RunConfig,
    p: CollectiveParams,
    gamma: Option<f64>,
    tau: f64,
    rk4: &DensityMatrix,
    bruteforce: bool,
) -> Result<CrossCheckRow, HarnessError> {
    let s = cfg.scenario;
    let g = gamma.unwrap_or(p.gamma);
    let closed = s.correlations(g, p.eta, tau)?;
    let x = s.state(g, p.eta, tau)?;
    let via_dynamics = state_via_dynamics(s.kind, s.effective_gamma(g), p.eta, tau)?;
    let generic = generic_report(&x, tau, closed.p_plus, closed.p_minus)?;
    let x_rk4 = XState::from_density(rk4, RK4_X_TOL).map_err(crate::measures::MeasureError::from)?;
    let from_rk4 = generic_report(&x_rk4, tau, closed.p_plus, closed.p_minus)?;
    let (tqd_bf, lqu_bf) = if bruteforce {
        let rho = x.to_density();
        (
            Some(tqd_bruteforce(&rho, &TqdBudget::default(), Execution::Sequential)?),
            Some(lqu_bruteforce(&rho, &LquGrid::default(), Execution::Sequential)?),
        )
    } else {
        (None, None)
    };
    let mut row = CrossCheckRow {
        closed,
        gamma,
        state_dev_dynamics: max_abs_diff(&x.to_matrix(), &via_dynamics.to_matrix()),
        state_dev_rk4: max_abs_diff(&x.to_matrix(), rk4.matrix()),
        concurrence_generic: generic.concurrence,
        tqd_generic: generic.tqd,
        lqu_generic: generic.lqu,
        concurrence_rk4: from_rk4.concurrence,
        tqd_rk4: from_rk4.tqd,
        lqu_rk4: from_rk4.lqu,
        tqd_bruteforce: tqd_bf,
        lqu_bruteforce: lqu_bf,
        pass: false,
    };
    row.pass = row.deviations(&cfg.tolerances).iter().all(|&(_, d, t)| d <= t);
    Ok(row)
}

pub fn cross_check(cfg: &RunConfig, exec: Execution) -> Result<CrossCheckReport, HarnessError> {
    let p = resolve_params(cfg)?.params;
    let taus = tau_grid(cfg.tau_max, cfg.samples);
    let gammas: Vec<Option<f64>> = match &cfg.sweep {
        None => vec![None],
        Some(v) => v.iter().map(|&g| Some(g)).collect(),
    };
    let per_unit = cfg.rk4_steps.unwrap_or_else(|| (2000.0 * p.eta.abs().max(1.0)).ceil() as usize);

    let series: Vec<Vec<DensityMatrix>> = exec
        .map(&gammas, |&g| {
            let gamma = cfg.scenario.effective_gamma(g.unwrap_or(p.gamma));
            rk4_series(cfg.scenario, CollectiveParams { gamma, eta: p.eta }, &taus, per_unit)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;

    let brute = bruteforce_rows(taus.len());
    let items: Vec<(usize, usize)> =
        (0..gammas.len()).flat_map(|gi| (0..taus.len()).map(move |ti| (gi, ti))).collect();
    let rows: Vec<CrossCheckRow> = exec
        .map(&items, |&(gi, ti)| {
            check_point(cfg, p, gammas[gi], taus[ti], &series[gi][ti], brute.binary_search(&ti).is_ok())
        })
        .into_iter()
        .collect::<Result<_, _>>()?;

    let mut worst: Option<(f64, Offender)> = None;
    for row in &rows {
        for (check, deviation, tolerance) in row.deviations(&cfg.tolerances) {
            let ratio = deviation / tolerance;
            if worst.as_ref().is_none_or(|(r, _)| ratio > *r) {
                let o = Offender { check, tau: row.closed.tau, gamma: row.gamma, deviation, tolerance };
                worst = Some((ratio, o));
            }
        }
    }
    Ok(CrossCheckReport { pass: rows.iter().all(|r| r.pass), rows, worst: worst.map(|(_, o)| o) })
}
