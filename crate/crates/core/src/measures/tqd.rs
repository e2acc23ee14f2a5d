use std::f64::consts::PI;

use crate::exec::Execution;
use crate::linalg::{self, kron, pauli, re, Mat2, Mat4};
use crate::optimize::{nelder_mead, NelderMead};
use crate::qstate::{DensityMatrix, XState};

use super::{clamp_measure, MeasureError};

/// Nonzero Fano–Bloch elements of the phase-removed X state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationElements {
    pub r11: f64,
    pub r22: f64,
    pub r33: f64,
    pub r30: f64,
    pub r03: f64,
}

impl CorrelationElements {
    pub fn of(x: &XState) -> Self {
        let (a14, a23) = (x.c14.norm(), x.c23.norm());
        CorrelationElements {
            r11: 2.0 * (a23 + a14),
            r22: 2.0 * (a23 - a14),
            r33: (x.p11 + x.p44) - (x.p22 + x.p33),
            r30: (x.p11 + x.p22) - (x.p33 + x.p44),
            r03: (x.p11 + x.p33) - (x.p22 + x.p44),
        }
    }
}

/// Trace-distance discord from the correlation elements. When the
/// denominator vanishes (below 1e-14) the limit value `|R₁₁|` is returned.
pub fn tqd_from_elements(r: &CorrelationElements) -> f64 {
    let (r11, r22, r33, r30) = (r.r11 * r.r11, r.r22 * r.r22, r.r33 * r.r33, r.r30 * r.r30);
    let rmin = r11.min(r33);
    let rmax = r33.max(r22 + r30);
    let den = rmax - rmin + r11 - r22;
    if den < 1e-14 {
        return clamp_measure(r.r11.abs());
    }
    clamp_measure(((r11 * rmax - r22 * rmin) / den).max(0.0).sqrt())
}

/// Closed-form trace-distance discord of an X state. Coherence phases are
/// removed first.
pub fn tqd_x(x: &XState) -> f64 {
    tqd_from_elements(&CorrelationElements::of(x))
}

/// Search effort for [`tqd_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TqdBudget {
    /// Polar samples of the measurement axis over `[0, π/2]`, ends included.
    pub polar: usize,
    /// Azimuthal samples over `[0, 2π)`.
    pub azimuth: usize,
    /// Function evaluations for the inner search at each grid axis.
    pub coarse_evals: usize,
    /// Best grid axes refined over all nine parameters.
    pub top_k: usize,
    /// Evaluations per refinement stage.
    pub polish_evals: usize,
    /// Fresh-simplex restarts at the end of each refinement.
    pub restarts: usize,
}

impl Default for TqdBudget {
    fn default() -> Self {
        TqdBudget { polar: 20, azimuth: 40, coarse_evals: 300, top_k: 4, polish_evals: 2500, restarts: 3 }
    }
}

impl TqdBudget {
    pub const MIN_POLAR: usize = 3;
    pub const MIN_AZIMUTH: usize = 4;
    pub const MIN_EVALS: usize = 50;

    fn check(&self) -> Result<(), MeasureError> {
        let small = |what: &str, got: usize, min: usize| {
            Err(MeasureError::BudgetTooSmall(format!("{what} = {got}, minimum {min}")))
        };
        if self.polar < Self::MIN_POLAR {
            return small("polar", self.polar, Self::MIN_POLAR);
        }
        if self.azimuth < Self::MIN_AZIMUTH {
            return small("azimuth", self.azimuth, Self::MIN_AZIMUTH);
        }
        if self.coarse_evals < Self::MIN_EVALS {
            return small("coarse_evals", self.coarse_evals, Self::MIN_EVALS);
        }
        if self.polish_evals < Self::MIN_EVALS {
            return small("polish_evals", self.polish_evals, Self::MIN_EVALS);
        }
        if self.top_k == 0 {
            return small("top_k", 0, 1);
        }
        Ok(())
    }
}

fn bloch_op(v: [f64; 3]) -> Mat2 {
    pauli(0) + pauli(1) * re(v[0]) + pauli(2) * re(v[1]) + pauli(3) * re(v[2])
}

fn axis(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn into_ball(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n > 1.0 {
        v.map(|x| x / n)
    } else {
        v
    }
}

/// `p Π₊⊗ρ_a + (1−p) Π₋⊗ρ_b` with `Π± = (1 ± n·σ)/2` and `ρ_v = (1 + v·σ)/2`.
///
/// Out-of-range inputs are projected: `p` onto `[0, 1]`, Bloch vectors onto
/// the unit ball, so every argument gives a classical-quantum state.
pub fn classical_quantum_state(n: [f64; 3], p: f64, a: [f64; 3], b: [f64; 3]) -> Mat4 {
    let p = p.clamp(0.0, 1.0);
    let (a, b) = (into_ball(a), into_ball(b));
    let plus = bloch_op(n) * re(0.5);
    let minus = bloch_op(n.map(|x| -x)) * re(0.5);
    kron(&plus, &(bloch_op(a) * re(0.5 * p))) + kron(&minus, &(bloch_op(b) * re(0.5 * (1.0 - p))))
}

/// `Σ √(λ² + ε²)` over the eigenvalues of `m`; the trace norm at `ε = 0`.
fn smoothed_trace_norm(m: &Mat4, eps: f64) -> f64 {
    let eig = linalg::hermitian_eigen(m);
    if eps == 0.0 {
        eig.values.iter().map(|l| l.abs()).sum()
    } else {
        eig.values.iter().map(|l| l.hypot(eps)).sum()
    }
}

struct Search<'a> {
    rho: &'a Mat4,
}

impl Search<'_> {
    /// `x = [p, a₁, a₂, a₃, b₁, b₂, b₃]` at fixed axis.
    fn inner_cost(&self, n: [f64; 3], x: &[f64], eps: f64) -> f64 {
        let chi = classical_quantum_state(n, x[0], [x[1], x[2], x[3]], [x[4], x[5], x[6]]);
        smoothed_trace_norm(&(self.rho - chi), eps)
    }

    /// `x = [θ, φ, p, a, b]`.
    fn full_cost(&self, x: &[f64], eps: f64) -> f64 {
        self.inner_cost(axis(x[0], x[1]), &x[2..], eps)
    }

    /// Weight and conditional Bloch vectors of the state dephased along `n`.
    fn dephased_start(&self, n: [f64; 3]) -> [f64; 7] {
        let plus = kron(&(bloch_op(n) * re(0.5)), &pauli(0));
        let p = linalg::trace_of_product(self.rho, &plus).re;
        let q = 1.0 - p;
        let mut out = [p, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for k in 0..3 {
            let s = kron(&pauli(0), &pauli(k + 1));
            let ab = plus * s;
            let joint = linalg::trace_of_product(self.rho, &ab).re;
            let total = linalg::trace_of_product(self.rho, &s).re;
            if p > 1e-12 {
                out[1 + k] = joint / p;
            }
            if q > 1e-12 {
                out[4 + k] = (total - joint) / q;
            }
        }
        out
    }
}

/// Trace-distance discord by direct search over classical-quantum states.
///
/// The search runs over the measurement axis on qubit 1, the weight and the
/// two conditional Bloch vectors of qubit 2. A grid over the axis
/// hemisphere, each point with a short inner search, is followed by a
/// nine-parameter refinement of the best points. Every returned value is the
/// exact distance to an explicit classical-quantum state, so the result is
/// an upper bound on the discord.
pub fn tqd_bruteforce(rho: &DensityMatrix, budget: &TqdBudget, exec: Execution) -> Result<f64, MeasureError> {
    budget.check()?;
    let search = Search { rho: rho.matrix() };

    let mut axes = Vec::new();
    for i in 0..budget.polar {
        let theta = 0.5 * PI * i as f64 / (budget.polar - 1) as f64;
        let count = if i == 0 { 1 } else { budget.azimuth };
        for j in 0..count {
            axes.push((theta, 2.0 * PI * j as f64 / budget.azimuth as f64));
        }
    }

    let coarse = NelderMead { max_evals: budget.coarse_evals, f_tol: 1e-10, x_tol: 1e-8 };
    let mut found: Vec<(f64, [f64; 9])> = exec.map(&axes, |&(theta, phi)| {
        let n = axis(theta, phi);
        let start = search.dephased_start(n);
        let m = nelder_mead(|x| search.inner_cost(n, x, 1e-3), &start, &[0.05; 7], coarse);
        let mut best = (search.inner_cost(n, &start, 0.0), start);
        let end = search.inner_cost(n, &m.x, 0.0);
        if end < best.0 {
            best = (end, m.x.clone().try_into().unwrap());
        }
        let mut full = [0.0; 9];
        full[0] = theta;
        full[1] = phi;
        full[2..].copy_from_slice(&best.1);
        (best.0, full)
    });
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.truncate(budget.top_k);

    let polish = NelderMead { max_evals: budget.polish_evals, f_tol: 1e-15, x_tol: 1e-10 };
    let refined = exec.map(&found, |&(value, start)| {
        let mut best = (value, start.to_vec());
        let mut x = start.to_vec();
        let mut step = [0.05; 9].to_vec();
        for eps in [1e-3, 1e-5, 0.0] {
            let m = nelder_mead(|v| search.full_cost(v, eps), &x, &step, polish);
            x = m.x;
            let exact = search.full_cost(&x, 0.0);
            if exact < best.0 {
                best = (exact, x.clone());
            }
            step.iter_mut().for_each(|s| *s *= 0.3);
        }
        for _ in 0..budget.restarts {
            step.iter_mut().for_each(|s| *s = (*s * 3.0).min(0.02));
            let m = nelder_mead(|v| search.full_cost(v, 0.0), &best.1, &step, polish);
            if m.f < best.0 {
                best = (m.f, m.x);
            }
        }
        best.0
    });
    let min = refined.into_iter().fold(f64::INFINITY, f64::min);
    Ok(clamp_measure(min))
}
