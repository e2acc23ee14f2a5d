use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen};

use crate::exec::Execution;
use crate::linalg::{self, kron, pauli, re, Mat2, Mat4};
use crate::optimize::{nelder_mead, NelderMead};
use crate::qstate::{hermitian_sqrt_generic, x_spectrum, DensityMatrix, XState, DEGENERATE_BLOCK_TOL};

use super::{clamp_measure, MeasureError};

/// Observable `n·σ` on the first qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalObservable {
    bloch: [f64; 3],
}

impl LocalObservable {
    pub fn new(bloch: [f64; 3]) -> Result<Self, MeasureError> {
        let n = (bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(MeasureError::NonUnitObservable(n));
        }
        Ok(LocalObservable { bloch })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        LocalObservable { bloch: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// `(n·σ) ⊗ 1`.
    pub fn operator(&self) -> Mat4 {
        let n = self.bloch;
        let k: Mat2 = pauli(1) * re(n[0]) + pauli(2) * re(n[1]) + pauli(3) * re(n[2]);
        kron(&k, &pauli(0))
    }
}

/// `Tr(ρK²) − Tr(√ρ K √ρ K)` with the root already formed.
fn skew_with_root(rho: &Mat4, root: &Mat4, k: &Mat4) -> f64 {
    let k2 = k * k;
    let a = root * k;
    linalg::trace_of_product(rho, &k2).re - linalg::trace_of_product(&a, &a).re
}

/// Wigner–Yanase skew information `−½ Tr([√ρ, K⊗1]²)`.
pub fn skew_information(rho: &DensityMatrix, k: &LocalObservable) -> Result<f64, MeasureError> {
    let root = hermitian_sqrt_generic(rho)?;
    Ok(skew_with_root(rho.matrix(), &root, &k.operator()))
}

/// `w_ij = Tr(√ρ (σ_i⊗1) √ρ (σ_j⊗1))`, i, j ∈ {1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WMatrix {
    pub w: [[f64; 3]; 3],
}

impl WMatrix {
    pub fn eigenvalues(&self) -> [f64; 3] {
        let m = Matrix3::from_fn(|i, j| self.w[i][j]);
        let mut e: [f64; 3] = SymmetricEigen::new(m).eigenvalues.into();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[2]
    }

    /// `1 − λ_max(W)`.
    pub fn lqu(&self) -> f64 {
        clamp_measure(1.0 - self.max_eigenvalue())
    }
}

/// W from the eigen-decomposition root.
pub fn w_matrix(rho: &DensityMatrix) -> Result<WMatrix, MeasureError> {
    let root = hermitian_sqrt_generic(rho)?;
    let ops: Vec<Mat4> = (1..=3).map(|i| root * kron(&pauli(i), &pauli(0))).collect();
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = linalg::trace_of_product(&ops[i], &ops[j]).re;
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    Ok(WMatrix { w })
}

/// W of an X state from its Fano–Bloch elements and block spectra.
///
/// With `A = √λ₁+√λ₄`, `B = √λ₂+√λ₃`, the elements are combined per block:
/// `T₁₁−T₂₂`, `T₁₂+T₂₁`, `T₃₀+T₀₃` live on the outer block and
/// `T₁₁+T₂₂`, `T₁₂−T₂₁`, `T₃₀−T₀₃` on the inner one, which keeps relative
/// accuracy when one block is nearly empty. Falls back to [`w_matrix`] when a
/// block is degenerate.
pub fn w_matrix_x(x: &XState) -> Result<WMatrix, MeasureError> {
    let n = x_spectrum(x)?.block_root_norms();
    let (a, b) = (n.outer, n.inner);
    if a * a < DEGENERATE_BLOCK_TOL || b * b < DEGENERATE_BLOCK_TOL {
        return w_matrix(&x.to_density());
    }
    let (u1, v1, s1) = (4.0 * x.c14.re, -4.0 * x.c14.im, 2.0 * (x.p11 - x.p44));
    let (u2, v2, s2) = (4.0 * x.c23.re, 4.0 * x.c23.im, 2.0 * (x.p22 - x.p33));
    let ab = a * b;
    // T₁₁²−T₂₂² = u₁u₂, T₁₂²−T₂₁² = v₁v₂, T₀₃²−T₃₀² = −s₁s₂.
    let w11 = ab + (u1 * u2 + v1 * v2 - s1 * s2) / (4.0 * ab);
    let w22 = ab - (u1 * u2 + v1 * v2 + s1 * s2) / (4.0 * ab);
    let w33 = 0.5 * (a * a + b * b)
        + (s1 * s1 - u1 * u1 - v1 * v1) / (8.0 * a * a)
        + (s2 * s2 - u2 * u2 - v2 * v2) / (8.0 * b * b);
    let w12 = (u2 * v1 - u1 * v2) / (4.0 * ab);
    Ok(WMatrix { w: [[w11, w12, 0.0], [w12, w22, 0.0], [0.0, 0.0, w33]] })
}

/// Local quantum uncertainty through the generic root.
pub fn lqu(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(w_matrix(rho)?.lqu())
}

/// Local quantum uncertainty of an X state in closed form.
pub fn lqu_x(x: &XState) -> Result<f64, MeasureError> {
    Ok(w_matrix_x(x)?.lqu())
}

/// Resolution of [`lqu_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LquGrid {
    /// Fibonacci-sphere points.
    pub points: usize,
    /// Best points refined by a local search over the two angles.
    pub polish: usize,
}

impl Default for LquGrid {
    fn default() -> Self {
        LquGrid { points: 10_000, polish: 3 }
    }
}

fn fibonacci_sphere(count: usize) -> Vec<(f64, f64)> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            (z.clamp(-1.0, 1.0).acos(), (golden * k as f64).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Minimum skew information over local observables, by grid search.
pub fn lqu_bruteforce(rho: &DensityMatrix, grid: &LquGrid, exec: Execution) -> Result<f64, MeasureError> {
    if grid.points < 2 {
        return Err(MeasureError::BudgetTooSmall(format!("points = {}, minimum 2", grid.points)));
    }
    let root = hermitian_sqrt_generic(rho)?;
    let m = rho.matrix();
    let skew = |theta: f64, phi: f64| skew_with_root(m, &root, &LocalObservable::from_angles(theta, phi).operator());

    let pts = fibonacci_sphere(grid.points);
    let mut vals: Vec<(f64, (f64, f64))> = exec.map(&pts, |&(t, p)| (skew(t, p), (t, p)));
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = vals[0].0;
    let opts = NelderMead { max_evals: 400, f_tol: 1e-16, x_tol: 1e-10 };
    for &(_, (t, p)) in vals.iter().take(grid.polish) {
        let r = nelder_mead(|x| skew(x[0], x[1]), &[t, p], &[0.02, 0.02], opts);
        best = best.min(r.f);
    }
    Ok(clamp_measure(best))
}
