//! Closed-form states and correlations for the three initial states, as
//! functions of `(γ, η, τ)`.
//!
//! Every report here has a slow twin in [`generic_report`], which feeds the
//! same state through the generic measures.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{self, feeding, CollectiveParams, CollectiveState, DynamicsError};
use crate::linalg::{c, re};
use crate::measures::{self, clamp_measure, MeasureError};
use crate::qstate::XState;

/// Below this gap `1 − γ²` the Bell-state quotients `δ/(1−γ²)` and
/// `E/(1−γ²)` are evaluated through the feeding terms instead.
const STABLE_GAMMA_GAP: f64 = 1e-3;

/// W elements whose block norms fall below this use the generic LQU path.
const W_DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("off-diagonal W element w12 = {0:e} should vanish")]
    NonzeroW12(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// `(|e₁e₂⟩ + |g₁g₂⟩)/√2`.
    BellZeroDouble,
    /// `|e₁g₂⟩`.
    SingleExcitation,
    /// `|+⟩ = (|e₁g₂⟩ + |g₁e₂⟩)/√2`.
    SymmetricBell,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] =
        [ScenarioKind::BellZeroDouble, ScenarioKind::SingleExcitation, ScenarioKind::SymmetricBell];

    pub fn initial_state(self) -> CollectiveState {
        match self {
            ScenarioKind::BellZeroDouble => CollectiveState::bell_zero_double(),
            ScenarioKind::SingleExcitation => CollectiveState::single_excitation(),
            ScenarioKind::SymmetricBell => CollectiveState::symmetric(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Use the `r₁₂ → 0` formulas (γ = 1) and ignore the supplied γ.
    pub near_zero_separation: bool,
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        Scenario { kind, near_zero_separation: false }
    }

    pub fn near_zero(kind: ScenarioKind) -> Self {
        Scenario { kind, near_zero_separation: true }
    }

    /// γ actually used by this scenario.
    pub fn effective_gamma(&self, gamma: f64) -> f64 {
        if self.near_zero_separation {
            1.0
        } else {
            gamma
        }
    }

    pub fn state(&self, gamma: f64, eta: f64, tau: f64) -> Result<XState, ScenarioError> {
        let g = self.effective_gamma(gamma);
        match self.kind {
            ScenarioKind::BellZeroDouble => state_bell_zero_double(g, tau),
            ScenarioKind::SingleExcitation => state_single_excitation(g, eta, tau),
            ScenarioKind::SymmetricBell => state_symmetric(g, tau),
        }
    }

    pub fn correlations(&self, gamma: f64, eta: f64, tau: f64) -> Result<CorrelationReport, ScenarioError> {
        if self.near_zero_separation {
            return correlations_near_zero_separation(*self, eta, tau);
        }
        match self.kind {
            ScenarioKind::BellZeroDouble => correlations_bell_zero_double(gamma, tau),
            ScenarioKind::SingleExcitation => correlations_single_excitation(gamma, eta, tau),
            ScenarioKind::SymmetricBell => correlations_symmetric(gamma, tau),
        }
    }
}

/// One row of a time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub tau: f64,
    pub concurrence: f64,
    pub tqd: f64,
    pub lqu: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl CorrelationReport {
    fn new(tau: f64, concurrence: f64, tqd: f64, lqu: f64, p_plus: f64, p_minus: f64) -> Self {
        CorrelationReport {
            tau,
            concurrence: clamp_measure(concurrence),
            tqd: clamp_measure(tqd),
            lqu: clamp_measure(lqu),
            p_plus,
            p_minus,
        }
    }
}

/// Correlations of `x` through the generic measures: Wootters concurrence on
/// the full matrix, the X-state discord formula and the generic W matrix.
pub fn generic_report(x: &XState, tau: f64, p_plus: f64, p_minus: f64) -> Result<CorrelationReport, MeasureError> {
    let rho = x.to_density();
    Ok(CorrelationReport::new(
        tau,
        measures::concurrence(&rho)?,
        measures::tqd_x(x),
        measures::lqu(&rho)?,
        p_plus,
        p_minus,
    ))
}

fn check_inputs(gamma: f64, eta: f64, tau: f64) -> Result<(), DynamicsError> {
    CollectiveParams::new(gamma, eta)?;
    if !tau.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    if tau < 0.0 {
        return Err(DynamicsError::NegativeTau(tau));
    }
    Ok(())
}

fn checked_state(x: XState) -> Result<XState, ScenarioError> {
    x.validate().map_err(|e| ScenarioError::Dynamics(DynamicsError::ResultNotPsd(e)))?;
    Ok(x)
}

/// Discord from the phase-removed elements, by branch:
/// `|R₁₁|` when `R₃₃² ≥ R₁₁²`, `|R₃₃|` when `R₃₃²` beats `R₂₂² + R₃₀²`,
/// the radical otherwise.
fn tqd_branches(r11: f64, r22: f64, r33: f64, r30: f64) -> f64 {
    let (s11, s22, s33, s30) = (r11 * r11, r22 * r22, r33 * r33, r30 * r30);
    if s33 >= s11 {
        r11.abs()
    } else if s22 + s30 >= s33 {
        ((s22 * (s11 - s33) + s11 * s30) / (s30 - s33 + s11)).sqrt()
    } else {
        r33.abs()
    }
}

/// `e^{−τ}cosh γτ` and `e^{−τ}sinh γτ`, without overflow at large `τ`.
fn damped_hyperbolic(gamma: f64, tau: f64) -> (f64, f64) {
    let slow = (-(1.0 - gamma) * tau).exp();
    let fast = (-(1.0 + gamma) * tau).exp();
    (0.5 * (slow + fast), 0.5 * (slow - fast))
}

/// `u = e^{−τ}`, `β = e^{−τ}δ/(1−γ²)` and `ε = e^{−τ}E/(1−γ²)` for the Bell
/// initial state, so that `b = β/2` and `e = ε/2`.
#[derive(Debug, Clone, Copy)]
struct BellTerms {
    u: f64,
    beta: f64,
    eps: f64,
}

impl BellTerms {
    fn new(gamma: f64, tau: f64) -> Self {
        let u = (-tau).exp();
        let gap = 1.0 - gamma * gamma;
        if gap >= STABLE_GAMMA_GAP {
            let (uch, ush) = damped_hyperbolic(gamma, tau);
            // e^{−τ}Z = e^{−τ}cosh γτ − e^{−2τ}.
            let uz = uch - u * u;
            let delta = (1.0 + gamma * gamma) * uz - 2.0 * gamma * ush;
            let big_e = 2.0 * gamma * uz - (1.0 + gamma * gamma) * ush;
            BellTerms { u, beta: delta / gap, eps: big_e / gap }
        } else {
            // ρ±± = ½F(1±γ, τ), b = (ρ₊₊+ρ₋₋)/2, e = (ρ₊₊−ρ₋₋)/2.
            let (fp, fm) = (feeding(1.0 + gamma, tau), feeding(1.0 - gamma, tau));
            BellTerms { u, beta: 0.5 * (fp + fm), eps: 0.5 * (fp - fm) }
        }
    }

    fn entries(&self) -> [f64; 5] {
        let u = self.u;
        let a = 0.5 * u * u;
        let b = 0.5 * self.beta;
        let c = 1.0 - 0.5 * u * u - self.beta;
        let d = 0.5 * u;
        let e = 0.5 * self.eps;
        [a, b, c, d, e]
    }
}

pub fn state_bell_zero_double(gamma: f64, tau: f64) -> Result<XState, ScenarioError> {
    check_inputs(gamma, 0.0, tau)?;
    let [a, b, cc, d, e] = BellTerms::new(gamma, tau).entries();
    checked_state(XState::new_unchecked(a, b, b, cc, re(d), re(e)))
}

pub fn correlations_bell_zero_double(gamma: f64, tau: f64) -> Result<CorrelationReport, ScenarioError> {
    let x = state_bell_zero_double(gamma, tau)?;
    let t = BellTerms::new(gamma, tau);
    let [a, b, cc, d, e] = t.entries();
    let u = t.u;

    // Concurrence: the branch belongs to the largest √ϑ.
    let root = (2.0 - 2.0 * t.beta - u * u).max(0.0).sqrt();
    let s_ac = (a * cc).max(0.0).sqrt();
    let candidates = [(d + s_ac).abs(), (d - s_ac).abs(), (b + e).abs(), (b - e).abs()];
    let largest = (0..4).max_by(|&i, &j| candidates[i].total_cmp(&candidates[j])).unwrap_or(0);
    let branch = match largest {
        0 | 1 => u - t.beta,
        2 => t.eps - u * root,
        _ => -t.eps - u * root,
    };
    let concurrence = branch.max(0.0);

    // Discord: e < 0 for γ < 0, and the branch formula needs |e|.
    let r11 = u + t.eps.abs();
    let r22 = t.eps.abs() - u;
    let r33 = 1.0 - 2.0 * t.beta;
    let r30 = u * u - 1.0 + t.beta;
    let tqd = tqd_branches(r11, r22, r33, r30);

    let lqu = bell_lqu(gamma, tau, &t, &x)?;
    Ok(CorrelationReport::new(tau, concurrence, tqd, lqu, b + e, b - e))
}

fn bell_lqu(gamma: f64, tau: f64, t: &BellTerms, x: &XState) -> Result<f64, ScenarioError> {
    let u = t.u;
    let beta = t.beta;
    let x_big = 1.0 + u * (1.0 - u * u - 2.0 * beta).max(0.0).sqrt();
    // 1 + u² − 2u·cosh γτ, factored to keep it accurate as γ → ±1.
    let y_arg = (-(1.0 - gamma) * tau).exp_m1() * (-(1.0 + gamma) * tau).exp_m1();
    let y_big = u * y_arg.max(0.0).sqrt();
    let outer = x_big - beta;
    let inner = beta + y_big;
    if outer < W_DEGENERATE_TOL || inner < W_DEGENERATE_TOL {
        return Ok(measures::lqu_x(x)?);
    }
    let ab = (outer * inner).sqrt();
    let cross = u * t.eps / ab;
    let w11 = ab + cross;
    let w22 = ab - cross;
    let w33 = 0.5 * (x_big + y_big) + ((u * u - 1.0 + beta).powi(2) - u * u) / (2.0 * outer)
        - t.eps * t.eps / (2.0 * inner);
    // Real coherences: the w12 numerator u₂v₁ − u₁v₂ is identically zero.
    let w12 = (x.c23.re * x.c14.im - x.c14.re * x.c23.im) / ab;
    if w12.abs() > 1e-12 {
        return Err(ScenarioError::NonzeroW12(w12));
    }
    Ok(1.0 - w11.max(w22).max(w33))
}

pub fn state_single_excitation(gamma: f64, eta: f64, tau: f64) -> Result<XState, ScenarioError> {
    check_inputs(gamma, eta, tau)?;
    let u = (-tau).exp();
    let (uch, ush) = damped_hyperbolic(gamma, tau);
    let (s2, c2) = (2.0 * eta * tau).sin_cos();
    let p22 = 0.5 * (uch + u * c2);
    let p33 = 0.5 * (uch - u * c2);
    let c23 = c(-0.5 * ush, 0.5 * u * s2);
    let p44 = 1.0 - uch;
    checked_state(XState::new_unchecked(0.0, p22, p33, p44, re(0.0), c23))
}

pub fn correlations_single_excitation(gamma: f64, eta: f64, tau: f64) -> Result<CorrelationReport, ScenarioError> {
    let x = state_single_excitation(gamma, eta, tau)?;
    let u = (-tau).exp();
    let (uch, ush) = damped_hyperbolic(gamma, tau);
    let (s2, c2) = (2.0 * eta * tau).sin_cos();
    let entangled = ush.hypot(u * s2);

    let ground = 1.0 - uch;
    let norm = uch * ground;
    let lqu = if norm < W_DEGENERATE_TOL {
        measures::lqu_x(&x)?
    } else {
        let w11 = (uch + u * c2) * ground / norm.sqrt();
        // (2ch − e^{−τ}(1 + 2sh² − cos 4ητ))/(2ch), scaled by e^{−τ} top and bottom.
        let w33 = 1.0 - u * u * (1.0 - (4.0 * eta * tau).cos()) / (2.0 * uch) - ush * (gamma * tau).tanh();
        1.0 - w11.max(w33)
    };
    let p_plus = 0.5 * (-(1.0 + gamma) * tau).exp();
    let p_minus = 0.5 * (-(1.0 - gamma) * tau).exp();
    Ok(CorrelationReport::new(tau, entangled, entangled, lqu, p_plus, p_minus))
}

pub fn state_symmetric(gamma: f64, tau: f64) -> Result<XState, ScenarioError> {
    check_inputs(gamma, 0.0, tau)?;
    let decay = (-(1.0 + gamma) * tau).exp();
    let alpha = 0.5 * decay;
    let beta = 1.0 - decay;
    checked_state(XState::new_unchecked(0.0, alpha, alpha, beta, re(0.0), re(alpha)))
}

pub fn correlations_symmetric(gamma: f64, tau: f64) -> Result<CorrelationReport, ScenarioError> {
    let x = state_symmetric(gamma, tau)?;
    let decay = (-(1.0 + gamma) * tau).exp();
    let w33 = 1.0 - decay;
    let lqu = if decay * w33 < W_DEGENERATE_TOL {
        measures::lqu_x(&x)?
    } else {
        let w11 = (decay * w33).sqrt();
        1.0 - w11.max(w33)
    };
    Ok(CorrelationReport::new(tau, decay, decay, lqu, decay, 0.0))
}

/// Correlations in the `r₁₂ → 0` limit, where `γ = 1`.
pub fn correlations_near_zero_separation(
    scenario: Scenario,
    eta: f64,
    tau: f64,
) -> Result<CorrelationReport, ScenarioError> {
    let x = scenario.state(1.0, eta, tau)?;
    let u = (-tau).exp();
    let u2 = u * u;
    match scenario.kind {
        ScenarioKind::BellZeroDouble => {
            let c1 = u * (1.0 - tau * u);
            let c2 = u * (tau * u - (2.0 - (1.0 + 2.0 * tau) * u2).max(0.0).sqrt());
            let concurrence = c1.max(c2).max(0.0);

            let t11 = u + tau * u2;
            let t22 = tau * u2 - u;
            let t33 = 1.0 - 2.0 * tau * u2;
            let t30 = (1.0 + tau) * u2 - 1.0;
            let tqd = tqd_branches(t11, t22, t33, t30);

            let a = 1.0 - tau * u2;
            let sb = (1.0 - (1.0 + 2.0 * tau) * u2).max(0.0).sqrt();
            let norm = tau * (a + u * sb);
            let lqu = if norm < W_DEGENERATE_TOL {
                measures::lqu_x(&x)?
            } else {
                let den = norm.sqrt();
                let w11 = (tau * u * a + tau * u2 * (1.0 + sb)) / den;
                let w22 = (tau * u * a + tau * u2 * (sb - 1.0)) / den;
                let w33 = 0.5 * (a + u * sb) + (((1.0 + tau) * u2 - 1.0).powi(2) - u2) / (2.0 * (a + u * sb));
                1.0 - w11.max(w22).max(w33)
            };
            Ok(CorrelationReport::new(tau, concurrence, tqd, lqu, tau * u2, 0.0))
        }
        ScenarioKind::SingleExcitation => {
            let (s2, c2) = (2.0 * eta * tau).sin_cos();
            let entangled = 0.5 * ((1.0 - u2).powi(2) + 4.0 * u2 * s2 * s2).sqrt();
            let norm = 1.0 - u2 * u2;
            let lqu = if norm < W_DEGENERATE_TOL {
                measures::lqu_x(&x)?
            } else {
                let w11 = (1.0 - u2) * (1.0 + u2 + 2.0 * u * c2) / (2.0 * norm.sqrt());
                let w33 = (u2 * (2.0 * (4.0 * eta * tau).cos() - u2 + 2.0) + 1.0) / (2.0 * (u2 + 1.0));
                1.0 - w11.max(w33)
            };
            Ok(CorrelationReport::new(tau, entangled, entangled, lqu, 0.5 * u2, 0.5))
        }
        ScenarioKind::SymmetricBell => {
            let w33 = 1.0 - u2;
            let lqu = if u2 * w33 < W_DEGENERATE_TOL {
                measures::lqu_x(&x)?
            } else {
                1.0 - (u * w33.sqrt()).max(w33)
            };
            Ok(CorrelationReport::new(tau, u2, u2, lqu, u2, 0.0))
        }
    }
}

/// The scenario state reached through the Dicke-basis dynamics instead of the
/// product-basis formulas.
pub fn state_via_dynamics(kind: ScenarioKind, gamma: f64, eta: f64, tau: f64) -> Result<XState, DynamicsError> {
    let p = CollectiveParams::new(gamma, eta)?;
    let s = dynamics::evolve_closed_form(&kind.initial_state(), &p, tau)?;
    dynamics::collective_to_product(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{default_rk4_steps, integrate_rk4};
    use crate::linalg::max_abs_diff;

    fn tau_grid(step: f64, max: f64) -> Vec<f64> {
        let n = (max / step).round() as usize;
        (0..=n).map(|k| k as f64 * step).collect()
    }

    const GAMMAS: [f64; 7] = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9];
    const ETAS: [f64; 3] = [0.0, 0.9, 5.0];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bell_state_examples() {
        let x = state_bell_zero_double(0.3, 0.0).unwrap();
        assert_eq!((x.p11, x.p22, x.p44, x.c14.re, x.c23.re), (0.5, 0.0, 0.5, 0.5, 0.0));

        let x = state_bell_zero_double(0.9, 0.5).unwrap();
        let got = [x.p11, x.p22, x.p44, x.c14.re, x.c23.re];
        let want = [0.1839, 0.0973, 0.6216, 0.3033, 0.0819];
        for (g, w) in got.iter().zip(want) {
            assert!(close(*g, w, 1e-4), "{got:?}");
        }

        for tau in [0.3, 1.0, 4.0] {
            let x = state_bell_zero_double(0.0, tau).unwrap();
            let u = (-tau).exp();
            assert!(close(x.p22, 0.5 * u * (1.0 - u), 1e-15));
            assert_eq!(x.c23.re, 0.0);
        }
    }

    #[test]
    fn bell_routes_agree_where_both_apply() {
        for gamma in [-0.99, -0.9, 0.5, 0.9, 0.99] {
            for tau in [0.1, 1.0, 3.0, 8.0] {
                let direct = BellTerms::new(gamma, tau);
                let (fp, fm) = (feeding(1.0 + gamma, tau), feeding(1.0 - gamma, tau));
                assert!(close(direct.beta, 0.5 * (fp + fm), 1e-11 * direct.beta.abs()));
                assert!(close(direct.eps, 0.5 * (fp - fm), 1e-11 * direct.eps.abs().max(1e-300)));
            }
        }
    }

    #[test]
    fn single_excitation_examples() {
        let x = state_single_excitation(0.4, 2.0, 0.0).unwrap();
        assert_eq!((x.p22, x.p33, x.p44), (1.0, 0.0, 0.0));
        let x = state_single_excitation(0.5, 0.9, 1.0).unwrap();
        assert!(close(x.p22, 0.1656, 1e-4), "{}", x.p22);
        for tau in [0.5, 2.0, 7.0] {
            let x = state_single_excitation(0.0, 0.0, tau).unwrap();
            assert!(close(x.p22, (-tau).exp(), 1e-15));
            assert!(x.p33.abs() < 1e-15);
        }
    }

    #[test]
    fn states_match_dynamics_route() {
        for kind in ScenarioKind::ALL {
            for gamma in GAMMAS.iter().copied().chain([-1.0, 1.0]) {
                for eta in ETAS {
                    for tau in tau_grid(0.5, 10.0) {
                        let a = Scenario::new(kind).state(gamma, eta, tau).unwrap();
                        let b = state_via_dynamics(kind, gamma, eta, tau).unwrap();
                        let diff = max_abs_diff(&a.to_matrix(), &b.to_matrix());
                        assert!(diff < 1e-12, "{kind:?} γ={gamma} η={eta} τ={tau}: {diff:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn states_match_rk4() {
        for kind in ScenarioKind::ALL {
            for (gamma, eta) in [(-0.5, 0.9), (0.9, 0.0)] {
                let tau = 2.0;
                let p = CollectiveParams::new(gamma, eta).unwrap();
                let rho0 = state_via_dynamics(kind, gamma, eta, 0.0).unwrap().to_density();
                let rk = integrate_rk4(&rho0, &p, tau, default_rk4_steps(tau, eta));
                let x = Scenario::new(kind).state(gamma, eta, tau).unwrap();
                assert!(max_abs_diff(&x.to_matrix(), rk.matrix()) < 1e-7);
            }
        }
    }

    #[test]
    fn correlation_examples() {
        let r = correlations_bell_zero_double(0.4, 0.0).unwrap();
        assert_eq!((r.concurrence, r.tqd), (1.0, 1.0));
        assert!(close(r.lqu, 1.0, 1e-12));

        let r = correlations_bell_zero_double(0.9, 0.5).unwrap();
        assert!(close(r.concurrence, 0.411994, 1e-6), "{}", r.concurrence);
        assert!(close(r.tqd, 0.617125, 1e-6), "{}", r.tqd);
        assert!(close(r.lqu, 0.252127, 1e-6), "{}", r.lqu);

        let r = correlations_single_excitation(0.2, 1.0, 0.0).unwrap();
        assert_eq!((r.concurrence, r.tqd), (0.0, 0.0));
        assert!(r.lqu.abs() < 1e-12);
        let r = correlations_single_excitation(0.5, 0.9, 1.0).unwrap();
        assert!(close(r.concurrence, 0.406323, 1e-6));
        assert_eq!(r.concurrence, r.tqd);

        let r = correlations_symmetric(0.1, 0.0).unwrap();
        assert_eq!((r.concurrence, r.tqd), (1.0, 1.0));
        assert!(close(r.lqu, 1.0, 1e-12));
        let r = correlations_symmetric(0.5, 1.0).unwrap();
        assert!(close(r.concurrence, (-1.5f64).exp(), 1e-15));
        let r = correlations_symmetric(0.0, 2f64.ln()).unwrap();
        assert!(close(r.concurrence, 0.5, 1e-15));
        assert!(close(r.lqu, 0.5, 1e-15));
    }

    #[test]
    fn bell_sudden_death_then_revival() {
        let conc: Vec<f64> =
            tau_grid(0.01, 10.0).iter().map(|&t| correlations_bell_zero_double(0.9, t).unwrap().concurrence).collect();
        let first_zero = conc.iter().position(|&x| x == 0.0).expect("no dark period");
        assert!(conc[first_zero..].iter().any(|&x| x > 0.0));
    }

    #[test]
    fn closed_forms_match_generic_pipeline() {
        for kind in ScenarioKind::ALL {
            for gamma in GAMMAS {
                for eta in ETAS {
                    for tau in tau_grid(0.1, 10.0) {
                        let s = Scenario::new(kind);
                        let r = s.correlations(gamma, eta, tau).unwrap();
                        let x = s.state(gamma, eta, tau).unwrap();
                        let g = generic_report(&x, tau, r.p_plus, r.p_minus).unwrap();
                        let ctx = format!("{kind:?} γ={gamma} η={eta} τ={tau}: {r:?} vs {g:?}");
                        assert!(close(r.concurrence, g.concurrence, 1e-10), "{ctx}");
                        assert!(close(r.tqd, g.tqd, 1e-10), "{ctx}");
                        assert!(close(r.lqu, g.lqu, 1e-10), "{ctx}");
                    }
                }
            }
        }
    }

    #[test]
    fn populations_match_dynamics() {
        for kind in ScenarioKind::ALL {
            for gamma in GAMMAS {
                for tau in tau_grid(0.7, 10.0) {
                    let r = Scenario::new(kind).correlations(gamma, 0.9, tau).unwrap();
                    let p = CollectiveParams::new(gamma, 0.9).unwrap();
                    let s = dynamics::evolve_closed_form(&kind.initial_state(), &p, tau).unwrap();
                    assert!(close(r.p_plus, s.p_pp, 1e-14), "{kind:?} {gamma} {tau}");
                    assert!(close(r.p_minus, s.p_mm, 1e-14), "{kind:?} {gamma} {tau}");
                }
            }
        }
    }

    #[test]
    fn entanglement_equals_discord_for_one_excitation_states() {
        for gamma in GAMMAS {
            for eta in ETAS {
                for tau in tau_grid(0.1, 10.0) {
                    let r = correlations_single_excitation(gamma, eta, tau).unwrap();
                    assert!(close(r.concurrence, r.tqd, 1e-12));
                    let r = correlations_symmetric(gamma, tau).unwrap();
                    assert!(close(r.concurrence, r.tqd, 1e-12));
                }
            }
        }
    }

    #[test]
    fn symmetric_decay_is_monotone() {
        for w in GAMMAS.windows(2) {
            let mut prev = f64::INFINITY;
            for tau in tau_grid(0.1, 10.0) {
                let lo = correlations_symmetric(w[0], tau).unwrap().concurrence;
                let hi = correlations_symmetric(w[1], tau).unwrap().concurrence;
                assert!(lo < prev);
                prev = lo;
                if tau > 0.0 {
                    assert!(hi < lo);
                }
            }
        }
    }

    #[test]
    fn radiant_populations_decay_exponentially() {
        for gamma in GAMMAS {
            for tau in tau_grid(0.5, 10.0) {
                let r = correlations_single_excitation(gamma, 0.3, tau).unwrap();
                assert!(close(r.p_plus * ((1.0 + gamma) * tau).exp(), 0.5, 1e-12));
                assert!(close(r.p_minus * ((1.0 - gamma) * tau).exp(), 0.5, 1e-12));
            }
        }
    }

    #[test]
    fn subradiant_tail_tracks_population() {
        for tau in tau_grid(0.1, 4.0) {
            let r = correlations_single_excitation(0.9, 0.9, 6.0 + tau).unwrap();
            assert!((r.concurrence / r.p_minus - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn near_zero_formulas_match_generic_pipeline_at_unit_gamma() {
        for kind in ScenarioKind::ALL {
            for eta in ETAS {
                for tau in tau_grid(0.1, 10.0) {
                    let s = Scenario::near_zero(kind);
                    let r = s.correlations(0.0, eta, tau).unwrap();
                    let x = s.state(0.0, eta, tau).unwrap();
                    let g = generic_report(&x, tau, r.p_plus, r.p_minus).unwrap();
                    let general = Scenario::new(kind).correlations(1.0, eta, tau).unwrap();
                    let ctx = format!("{kind:?} η={eta} τ={tau}: {r:?} vs {g:?}");
                    for (a, b) in [(r.concurrence, g.concurrence), (r.tqd, g.tqd), (r.lqu, g.lqu)] {
                        assert!(close(a, b, 1e-10), "{ctx}");
                    }
                    for (a, b) in [
                        (r.concurrence, general.concurrence),
                        (r.tqd, general.tqd),
                        (r.lqu, general.lqu),
                        (r.p_plus, general.p_plus),
                        (r.p_minus, general.p_minus),
                    ] {
                        assert!(close(a, b, 1e-10), "{ctx} vs {general:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn near_zero_examples() {
        let s = Scenario::near_zero(ScenarioKind::SymmetricBell);
        let r = s.correlations(0.0, 0.0, 0.0).unwrap();
        assert_eq!((r.concurrence, r.tqd), (1.0, 1.0));
        assert!(close(r.lqu, 1.0, 1e-12));

        let e1 = (-1.0f64).exp();
        let r = Scenario::near_zero(ScenarioKind::BellZeroDouble).correlations(0.0, 0.0, 1.0).unwrap();
        // Branch logic at τ = 1 selects |R₁₁| = e^{−1}(1 + e^{−1}).
        assert!(close(r.tqd, e1 * (1.0 + e1), 1e-12), "{}", r.tqd);
        assert!(close(r.concurrence, e1 * (1.0 - e1), 1e-12), "{}", r.concurrence);
    }

    #[test]
    fn long_times_stay_finite() {
        for kind in ScenarioKind::ALL {
            for gamma in [-1.0, -0.9, 0.0, 0.9, 1.0] {
                for tau in [50.0, 400.0, 800.0, 1e6] {
                    let r = Scenario::new(kind).correlations(gamma, 0.9, tau).unwrap();
                    let all = [r.concurrence, r.tqd, r.lqu, r.p_plus, r.p_minus];
                    assert!(all.iter().all(|v| v.is_finite()), "{kind:?} γ={gamma} τ={tau}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(state_bell_zero_double(1.5, 1.0).is_err());
        assert!(state_symmetric(0.5, -1.0).is_err());
        assert!(correlations_single_excitation(0.5, f64::NAN, 1.0).is_err());
    }
}
