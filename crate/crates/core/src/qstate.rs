//! Two-qubit states: validation, X states, Fano–Bloch tensors and the
//! closed-form square root of an X state.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, hermitian_eigen, re, Mat4, C64, ZERO};

/// Tolerance for Hermiticity and unit trace.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues down to this value count as zero.
pub const PSD_TOL: f64 = -1e-10;
/// Below this, `t + 2√d` of an X block is treated as a zero block.
pub const DEGENERATE_BLOCK_TOL: f64 = 1e-14;
/// Eigenvalues below this are taken as exact zeros when forming `√ρ`.
///
/// `√λ` has unbounded slope at 0, so rounding noise of order 1e-17 in a
/// structurally zero eigenvalue would otherwise show up as ~3e-9 in `√ρ`.
pub const RANK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum StateError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max |m_ij - conj(m_ji)| = {0:e})")]
    NonHermitian(f64),
    #[error("trace is {0} instead of 1")]
    TraceNotOne(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),
    #[error("matrix has weight {0:e} outside the X pattern")]
    NotXShaped(f64),
    #[error("{block} block has negative discriminant t^2 - 4d = {value:e}")]
    NegativeDiscriminant { block: XBlock, value: f64 },
    #[error("{block} block is numerically zero (t + 2 sqrt(d) = {value:e})")]
    DegenerateBlock { block: XBlock, value: f64 },
}

/// The two 2×2 blocks of an X state: `{|1⟩,|4⟩}` and `{|2⟩,|3⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XBlock {
    Outer,
    Inner,
}

impl fmt::Display for XBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XBlock::Outer => f.write_str("outer (1,4)"),
            XBlock::Inner => f.write_str("inner (2,3)"),
        }
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    /// Wraps a matrix the caller already knows to be a state.
    pub(crate) fn from_matrix_unchecked(m: Mat4) -> Self {
        DensityMatrix(m)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigen(&self.0).values
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat4::identity() * re(0.25))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn pure(amplitudes: [C64; 4]) -> Self {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let m = Mat4::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        DensityMatrix(m)
    }

    /// `(|e₁e₂⟩ + |g₁g₂⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        Self::pure([re(1.0), ZERO, ZERO, re(1.0)])
    }

    /// `U ρ U†`; unitarity of `u` is the caller's responsibility.
    pub fn conjugate_by(&self, u: &Mat4) -> Self {
        DensityMatrix(u * self.0 * u.adjoint())
    }

    /// Largest modulus among the entries an X state must have zero.
    pub fn off_x_weight(&self) -> f64 {
        let mut w: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    w = w.max(self.0[(i, j)].norm());
                }
            }
        }
        w
    }
}

/// Checks Hermiticity, trace and positivity. Entries within tolerance are
/// replaced by the Hermitian part before the spectral checks.
pub fn validate_density(m: &Mat4) -> Result<DensityMatrix, StateError> {
    if m.iter().any(|z| !z.is_finite()) {
        return Err(StateError::NonFinite);
    }
    let defect = linalg::hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(StateError::NonHermitian(defect));
    }
    let h = linalg::hermitian_part(m);
    let tr = linalg::trace(&h).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(StateError::TraceNotOne(tr));
    }
    let min = hermitian_eigen(&h).values[0];
    if min < PSD_TOL {
        return Err(StateError::NotPositiveSemidefinite(min));
    }
    Ok(DensityMatrix(h))
}

/// Two-qubit X state: populations on the diagonal, coherences `ρ₁₄` and `ρ₂₃`
/// on the anti-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub c14: C64,
    pub c23: C64,
}

impl XState {
    pub fn new(p11: f64, p22: f64, p33: f64, p44: f64, c14: C64, c23: C64) -> Result<Self, StateError> {
        let x = XState { p11, p22, p33, p44, c14, c23 };
        x.validate()?;
        Ok(x)
    }

    /// Builds without validation; used for intermediate algebra.
    pub const fn new_unchecked(p11: f64, p22: f64, p33: f64, p44: f64, c14: C64, c23: C64) -> Self {
        XState { p11, p22, p33, p44, c14, c23 }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let entries = [self.p11, self.p22, self.p33, self.p44];
        if entries.iter().any(|x| !x.is_finite()) || !self.c14.is_finite() || !self.c23.is_finite() {
            return Err(StateError::NonFinite);
        }
        let tr = self.p11 + self.p22 + self.p33 + self.p44;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne(tr));
        }
        let min_p = self.p11.min(self.p22).min(self.p33).min(self.p44);
        if min_p < PSD_TOL {
            return Err(StateError::NotPositiveSemidefinite(min_p));
        }
        let outer = (self.p11.max(0.0) * self.p44.max(0.0)).sqrt() - self.c14.norm();
        let inner = (self.p22.max(0.0) * self.p33.max(0.0)).sqrt() - self.c23.norm();
        let worst = outer.min(inner);
        if worst < PSD_TOL {
            return Err(StateError::NotPositiveSemidefinite(worst));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        m[(0, 0)] = re(self.p11);
        m[(1, 1)] = re(self.p22);
        m[(2, 2)] = re(self.p33);
        m[(3, 3)] = re(self.p44);
        m[(0, 3)] = self.c14;
        m[(3, 0)] = self.c14.conj();
        m[(1, 2)] = self.c23;
        m[(2, 1)] = self.c23.conj();
        m
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix(self.to_matrix())
    }

    /// Reads the X entries of `rho`, rejecting weight outside the X pattern.
    pub fn from_density(rho: &DensityMatrix, tol: f64) -> Result<Self, StateError> {
        let w = rho.off_x_weight();
        if w > tol {
            return Err(StateError::NotXShaped(w));
        }
        let m = rho.matrix();
        Ok(XState {
            p11: m[(0, 0)].re,
            p22: m[(1, 1)].re,
            p33: m[(2, 2)].re,
            p44: m[(3, 3)].re,
            c14: m[(0, 3)],
            c23: m[(1, 2)],
        })
    }

    pub fn is_real_nonnegative(&self) -> bool {
        self.c14.im == 0.0 && self.c23.im == 0.0 && self.c14.re >= 0.0 && self.c23.re >= 0.0
    }
}

/// `T_αβ = Tr(M σ_α⊗σ_β)`, α, β ∈ {0,1,2,3}.
///
/// For a state `t[0][0] = 1`; for other operators (e.g. `√ρ`) it is the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoBlochTensor {
    pub t: [[f64; 4]; 4],
}

impl FanoBlochTensor {
    /// Decomposes a Hermitian operator; imaginary parts of the traces vanish.
    pub fn of_operator(m: &Mat4) -> Self {
        let mut t = [[0.0; 4]; 4];
        for (alpha, row) in t.iter_mut().enumerate() {
            for (beta, entry) in row.iter_mut().enumerate() {
                *entry = linalg::trace_of_product(m, &linalg::pauli_product(alpha, beta)).re;
            }
        }
        FanoBlochTensor { t }
    }

    /// `(1/4) Σ t_αβ σ_α⊗σ_β`.
    pub fn reconstruct(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for alpha in 0..4 {
            for beta in 0..4 {
                let w = self.t[alpha][beta];
                if w != 0.0 {
                    m += linalg::pauli_product(alpha, beta) * re(0.25 * w);
                }
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, alpha: usize, beta: usize) -> f64 {
        self.t[alpha][beta]
    }
}

pub fn fano_bloch_decompose(rho: &DensityMatrix) -> FanoBlochTensor {
    let mut t = FanoBlochTensor::of_operator(rho.matrix());
    t.t[0][0] = 1.0;
    t
}

/// Strips the phases of `ρ₁₄` and `ρ₂₃` by a local diagonal unitary.
pub fn remove_x_phases(x: &XState) -> XState {
    XState { c14: re(x.c14.norm()), c23: re(x.c23.norm()), ..*x }
}

/// The local unitary `diag(e^{iθ₁}, 1) ⊗ diag(e^{iθ₂}, 1)` that maps `x` to
/// `remove_x_phases(x)` (on `|e⟩`, i.e. `|0⟩` in the qubit convention).
pub fn phase_removing_unitary(x: &XState) -> Mat4 {
    let th14 = x.c14.arg();
    let th23 = x.c23.arg();
    // ρ₁₄ picks up e^{i(θ₁+θ₂)}, ρ₂₃ picks up e^{i(θ₁−θ₂)}.
    let th1 = -(th14 + th23) / 2.0;
    let th2 = -(th14 - th23) / 2.0;
    let u1 = linalg::Mat2::new(C64::from_polar(1.0, th1), ZERO, ZERO, re(1.0));
    let u2 = linalg::Mat2::new(C64::from_polar(1.0, th2), ZERO, ZERO, re(1.0));
    linalg::kron(&u1, &u2)
}

/// Block traces/determinants and the four eigenvalues of an X state.
///
/// `lambda = [λ₁, λ₂, λ₃, λ₄]` with `λ₁ ≥ λ₄` from the outer block and
/// `λ₂ ≥ λ₃` from the inner block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XSpectralData {
    pub t1: f64,
    pub d1: f64,
    pub t2: f64,
    pub d2: f64,
    pub lambda: [f64; 4],
}

fn block_roots(t: f64, d: f64, block: XBlock) -> Result<(f64, f64), StateError> {
    let disc = t * t - 4.0 * d;
    if disc < PSD_TOL {
        return Err(StateError::NegativeDiscriminant { block, value: disc });
    }
    let big = 0.5 * (t + disc.max(0.0).sqrt());
    // d/λ_big avoids the cancellation in (t − √disc)/2.
    let small = if big > 0.0 { d / big } else { 0.0 };
    Ok((big, small))
}

/// `√d` of a block, zero when the block's smaller eigenvalue is below
/// [`RANK_TOL`].
fn block_sqrt_det(t: f64, d: f64) -> f64 {
    let disc = (t * t - 4.0 * d).max(0.0);
    let big = 0.5 * (t + disc.sqrt());
    if big <= 0.0 || d / big < RANK_TOL {
        0.0
    } else {
        d.sqrt()
    }
}

pub fn x_spectrum(x: &XState) -> Result<XSpectralData, StateError> {
    let t1 = x.p11 + x.p44;
    let d1 = x.p11 * x.p44 - x.c14.norm_sqr();
    let t2 = x.p22 + x.p33;
    let d2 = x.p22 * x.p33 - x.c23.norm_sqr();
    let (l1, l4) = block_roots(t1, d1, XBlock::Outer)?;
    let (l2, l3) = block_roots(t2, d2, XBlock::Inner)?;
    Ok(XSpectralData { t1, d1, t2, d2, lambda: [l1, l2, l3, l4] })
}

/// `√(t + 2√d)` for both blocks, i.e. the traces of the two blocks of `√ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRootNorms {
    pub outer: f64,
    pub inner: f64,
}

impl XSpectralData {
    pub fn block_root_norms(&self) -> BlockRootNorms {
        BlockRootNorms {
            outer: (self.t1 + 2.0 * block_sqrt_det(self.t1, self.d1)).max(0.0).sqrt(),
            inner: (self.t2 + 2.0 * block_sqrt_det(self.t2, self.d2)).max(0.0).sqrt(),
        }
    }

    /// `√λᵢ` from the block traces and determinants.
    pub fn sqrt_lambda(&self) -> [f64; 4] {
        let half_root = |t: f64, d: f64| {
            let sd = block_sqrt_det(t, d);
            let plus = (t + 2.0 * sd).max(0.0).sqrt();
            let minus = (t - 2.0 * sd).max(0.0).sqrt();
            (0.5 * (plus + minus), 0.5 * (plus - minus))
        };
        let (s1, s4) = half_root(self.t1, self.d1);
        let (s2, s3) = half_root(self.t2, self.d2);
        [s1, s2, s3, s4]
    }
}

fn nondegenerate_norms(x: &XState) -> Result<(XSpectralData, BlockRootNorms), StateError> {
    let spec = x_spectrum(x)?;
    let norms = spec.block_root_norms();
    let outer = norms.outer * norms.outer;
    if outer < DEGENERATE_BLOCK_TOL {
        return Err(StateError::DegenerateBlock { block: XBlock::Outer, value: outer });
    }
    let inner = norms.inner * norms.inner;
    if inner < DEGENERATE_BLOCK_TOL {
        return Err(StateError::DegenerateBlock { block: XBlock::Inner, value: inner });
    }
    Ok((spec, norms))
}

/// Closed-form principal square root of an X state. Each 2×2 block `B` has
/// `√B = (B + √det B · 1) / √(tr B + 2√det B)`.
pub fn sqrt_x(x: &XState) -> Result<Mat4, StateError> {
    let (spec, n) = nondegenerate_norms(x)?;
    let sd1 = block_sqrt_det(spec.t1, spec.d1);
    let sd2 = block_sqrt_det(spec.t2, spec.d2);
    let mut m = Mat4::zeros();
    m[(0, 0)] = re((x.p11 + sd1) / n.outer);
    m[(3, 3)] = re((x.p44 + sd1) / n.outer);
    m[(0, 3)] = x.c14 / n.outer;
    m[(3, 0)] = x.c14.conj() / n.outer;
    m[(1, 1)] = re((x.p22 + sd2) / n.inner);
    m[(2, 2)] = re((x.p33 + sd2) / n.inner);
    m[(1, 2)] = x.c23 / n.inner;
    m[(2, 1)] = x.c23.conj() / n.inner;
    Ok(m)
}

/// `√ρ` of an X state, falling back to the eigen-decomposition when a block
/// is degenerate.
pub fn sqrt_x_or_generic(x: &XState) -> Result<Mat4, StateError> {
    match sqrt_x(x) {
        Err(StateError::DegenerateBlock { .. }) => hermitian_sqrt_generic(&x.to_density()),
        other => other,
    }
}

/// Fano–Bloch coefficients `R_χδ = Tr(√ρ σ_χ⊗σ_δ)` of `√ρ` from the state's
/// own tensor `T` and the block norms.
pub fn sqrt_fano_bloch(x: &XState) -> Result<FanoBlochTensor, StateError> {
    let (_, n) = nondegenerate_norms(x)?;
    let t = fano_bloch_decompose(&x.to_density());
    let (s1, s2) = (n.outer, n.inner);
    let t11 = t.get(1, 1);
    let t22 = t.get(2, 2);
    let t12 = t.get(1, 2);
    let t21 = t.get(2, 1);
    let t30 = t.get(3, 0);
    let t03 = t.get(0, 3);

    let mut r = [[0.0; 4]; 4];
    r[0][0] = s1 + s2;
    r[0][3] = 0.5 * (t30 + t03) / s1 - 0.5 * (t30 - t03) / s2;
    r[3][0] = 0.5 * (t30 + t03) / s1 + 0.5 * (t30 - t03) / s2;
    r[1][1] = 0.5 * (t11 + t22) / s2 + 0.5 * (t11 - t22) / s1;
    r[1][2] = 0.5 * (t12 - t21) / s2 + 0.5 * (t12 + t21) / s1;
    r[2][1] = 0.5 * (t12 + t21) / s1 - 0.5 * (t12 - t21) / s2;
    r[2][2] = 0.5 * (t11 + t22) / s2 - 0.5 * (t11 - t22) / s1;
    r[3][3] = s1 - s2;
    Ok(FanoBlochTensor { t: r })
}

/// Principal square root through the eigen-decomposition. Eigenvalues below
/// [`RANK_TOL`] count as zero.
pub fn hermitian_sqrt_generic(rho: &DensityMatrix) -> Result<Mat4, StateError> {
    let eig = hermitian_eigen(rho.matrix());
    if eig.values[0] < PSD_TOL {
        return Err(StateError::NotPositiveSemidefinite(eig.values[0]));
    }
    Ok(eig.map_spectrum(|x| if x < RANK_TOL { 0.0 } else { x.sqrt() }))
}

/// Uniform random local unitary from six angles (two SU(2) factors).
pub fn local_unitary(angles: [f64; 6]) -> Mat4 {
    let su2 = |a: f64, b: f64, g: f64| {
        let (sa, ca) = a.sin_cos();
        linalg::Mat2::new(
            C64::from_polar(ca, b),
            C64::from_polar(sa, g),
            -C64::from_polar(sa, -g),
            C64::from_polar(ca, -b),
        )
    };
    linalg::kron(&su2(angles[0], angles[1], angles[2]), &su2(angles[3], angles[4], angles[5]))
}
