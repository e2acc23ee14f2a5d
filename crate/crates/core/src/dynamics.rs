//! Collective spontaneous emission of two identical two-level atoms.
//!
//! Time is measured in units of the single-atom decay rate, `τ = Γt`. The
//! coupling enters through `γ = Γ₁₂/Γ` and `η = Ω₁₂/Γ`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{self, c, kron, lowering, re, Mat2, Mat4, C64, ZERO};
use crate::qstate::{DensityMatrix, StateError, XState, PSD_TOL};

pub const UNIT_TOL: f64 = 1e-12;
pub const GAMMA_TOL: f64 = 1e-12;
/// `|η|` above this is flagged: the near-field shift dwarfs the decay rate.
pub const LARGE_SHIFT: f64 = 1e3;
/// Below this `ξ` the damping ratio is summed as a power series.
const SERIES_XI: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("atoms are at zero separation; use the near-zero-separation formulas")]
    ZeroSeparation,
    #[error("dipole direction has norm {0}, expected 1")]
    NonUnitDipole(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("|gamma| = {0} exceeds 1")]
    GammaOutOfRange(f64),
    #[error("tau = {0} is negative")]
    NegativeTau(f64),
    #[error("collective populations sum to {0} instead of 1")]
    PopulationsNotNormalized(f64),
    #[error("collective population {0:e} is negative")]
    NegativePopulation(f64),
    #[error("product-basis state is not positive semidefinite: {0}")]
    ResultNotPsd(StateError),
}

pub type Vec3 = [f64; 3];

fn norm(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Relative position of the two atoms (in units of the resonant wavelength)
/// and the common dipole orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPairGeometry {
    pub separation: Vec3,
    pub dipole_direction: Vec3,
}

impl AtomPairGeometry {
    pub fn new(separation: Vec3, dipole_direction: Vec3) -> Result<Self, DynamicsError> {
        if separation.iter().chain(dipole_direction.iter()).any(|x| !x.is_finite()) {
            return Err(DynamicsError::NonFinite);
        }
        let n = norm(&dipole_direction);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(DynamicsError::NonUnitDipole(n));
        }
        Ok(AtomPairGeometry { separation, dipole_direction })
    }

    /// `ξ = 2π r/λ₀`.
    pub fn xi(&self) -> f64 {
        2.0 * PI * norm(&self.separation)
    }

    /// `(μ̂·r̂)²`.
    pub fn alignment_sq(&self) -> Result<f64, DynamicsError> {
        let r = norm(&self.separation);
        if r == 0.0 {
            return Err(DynamicsError::ZeroSeparation);
        }
        let u = dot(&self.dipole_direction, &self.separation) / r;
        Ok(u * u)
    }
}

/// `cos ξ/ξ² − sin ξ/ξ³`, summed as `Σ_{n≥1} (−1)ⁿ 2n ξ^{2n−2}/(2n+1)!` near 0.
fn near_field_damping(xi: f64) -> f64 {
    if xi >= SERIES_XI {
        return xi.cos() / (xi * xi) - xi.sin() / (xi * xi * xi);
    }
    let x2 = xi * xi;
    let mut sum = 0.0;
    let mut pow = 1.0; // ξ^{2n−2}
    let mut fact = 6.0; // (2n+1)!
    for n in 1..=12 {
        let nf = n as f64;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * 2.0 * nf * pow / fact;
        pow *= x2;
        fact *= (2.0 * nf + 2.0) * (2.0 * nf + 3.0);
    }
    sum
}

fn sinc(xi: f64) -> f64 {
    if xi < 1e-4 {
        1.0 - xi * xi / 6.0
    } else {
        xi.sin() / xi
    }
}

/// `γ = Γ₁₂/Γ`.
pub fn collective_damping_ratio(g: &AtomPairGeometry) -> Result<f64, DynamicsError> {
    let u2 = g.alignment_sq()?;
    let xi = g.xi();
    Ok(1.5 * ((1.0 - u2) * sinc(xi) + (1.0 - 3.0 * u2) * near_field_damping(xi)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleShift {
    pub eta: f64,
    /// Set when `|η| > LARGE_SHIFT`.
    pub large: bool,
}

/// `η = Ω₁₂/Γ`. Diverges like `ξ⁻³` as the atoms approach.
pub fn dipole_dipole_shift(g: &AtomPairGeometry) -> Result<DipoleShift, DynamicsError> {
    let u2 = g.alignment_sq()?;
    let xi = g.xi();
    let (s, co) = xi.sin_cos();
    let eta = 0.75 * (-(1.0 - u2) * co / xi + (1.0 - 3.0 * u2) * (s / (xi * xi) + co / (xi * xi * xi)));
    Ok(DipoleShift { eta, large: eta.abs() > LARGE_SHIFT })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveParams {
    pub gamma: f64,
    pub eta: f64,
}

impl CollectiveParams {
    pub fn new(gamma: f64, eta: f64) -> Result<Self, DynamicsError> {
        if !gamma.is_finite() || !eta.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        if gamma.abs() > 1.0 + GAMMA_TOL {
            return Err(DynamicsError::GammaOutOfRange(gamma.abs()));
        }
        Ok(CollectiveParams { gamma, eta })
    }

    /// Both parameters from the geometry; also reports the large-shift flag.
    pub fn from_geometry(g: &AtomPairGeometry) -> Result<(Self, bool), DynamicsError> {
        let gamma = collective_damping_ratio(g)?;
        let shift = dipole_dipole_shift(g)?;
        Ok((CollectiveParams::new(gamma, shift.eta)?, shift.large))
    }
}

/// State in the Dicke basis `{|e⟩, |+⟩, |−⟩, |g⟩}` with
/// `|±⟩ = (|e₁g₂⟩ ± |g₁e₂⟩)/√2`.
///
/// `c_pm` uses the convention of [`collective_to_product`]; in terms of the
/// basis vectors above it is `⟨−|ρ|+⟩`. One-excitation coherences such as
/// `ρ_{e+}` are not stored; they vanish for every initial state used here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveState {
    pub p_ee: f64,
    pub p_pp: f64,
    pub p_mm: f64,
    pub p_gg: f64,
    pub c_pm: C64,
    pub c_eg: C64,
}

impl CollectiveState {
    pub fn new(p_ee: f64, p_pp: f64, p_mm: f64, p_gg: f64, c_pm: C64, c_eg: C64) -> Result<Self, DynamicsError> {
        let s = CollectiveState { p_ee, p_pp, p_mm, p_gg, c_pm, c_eg };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let pops = [self.p_ee, self.p_pp, self.p_mm, self.p_gg];
        if pops.iter().any(|x| !x.is_finite()) || !self.c_pm.is_finite() || !self.c_eg.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        let sum: f64 = pops.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DynamicsError::PopulationsNotNormalized(sum));
        }
        let min = pops.iter().copied().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(DynamicsError::NegativePopulation(min));
        }
        Ok(())
    }

    pub fn excited() -> Self {
        CollectiveState { p_ee: 1.0, p_pp: 0.0, p_mm: 0.0, p_gg: 0.0, c_pm: ZERO, c_eg: ZERO }
    }

    pub fn symmetric() -> Self {
        CollectiveState { p_ee: 0.0, p_pp: 1.0, p_mm: 0.0, p_gg: 0.0, c_pm: ZERO, c_eg: ZERO }
    }

    pub fn antisymmetric() -> Self {
        CollectiveState { p_ee: 0.0, p_pp: 0.0, p_mm: 1.0, p_gg: 0.0, c_pm: ZERO, c_eg: ZERO }
    }

    /// `(|e₁e₂⟩ + |g₁g₂⟩)/√2`.
    pub fn bell_zero_double() -> Self {
        CollectiveState { p_ee: 0.5, p_pp: 0.0, p_mm: 0.0, p_gg: 0.5, c_pm: ZERO, c_eg: re(0.5) }
    }

    /// `|e₁g₂⟩ = (|+⟩ + |−⟩)/√2`.
    pub fn single_excitation() -> Self {
        CollectiveState { p_ee: 0.0, p_pp: 0.5, p_mm: 0.5, p_gg: 0.0, c_pm: re(0.5), c_eg: ZERO }
    }
}

/// `(a/(2−a))·(e^{−aτ} − e^{−2τ})`, continuous through `a = 2`.
pub(crate) fn feeding(a: f64, tau: f64) -> f64 {
    let x = (2.0 - a) * tau;
    if x.abs() < 1.0 {
        // e^{−aτ} − e^{−2τ} = e^{−2τ}·expm1(x), and expm1(x)/x → 1.
        let phi = if x == 0.0 { 1.0 } else { x.exp_m1() / x };
        a * tau * (-2.0 * tau).exp() * phi
    } else {
        a / (2.0 - a) * ((-a * tau).exp() - (-2.0 * tau).exp())
    }
}

/// Closed-form evolution over `τ`. Valid for all `|γ| ≤ 1`, including the
/// endpoints where the feeding terms take their polynomial-in-τ limits.
pub fn evolve_closed_form(s0: &CollectiveState, p: &CollectiveParams, tau: f64) -> Result<CollectiveState, DynamicsError> {
    if !tau.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    if tau < 0.0 {
        return Err(DynamicsError::NegativeTau(tau));
    }
    let g = p.gamma;
    let p_ee = (-2.0 * tau).exp() * s0.p_ee;
    let p_pp = (-(1.0 + g) * tau).exp() * s0.p_pp + feeding(1.0 + g, tau) * s0.p_ee;
    let p_mm = (-(1.0 - g) * tau).exp() * s0.p_mm + feeding(1.0 - g, tau) * s0.p_ee;
    let p_gg = 1.0 - p_ee - p_pp - p_mm;
    let c_pm = C64::from_polar((-tau).exp(), 2.0 * p.eta * tau) * s0.c_pm;
    let c_eg = s0.c_eg * (-tau).exp();
    Ok(CollectiveState { p_ee, p_pp, p_mm, p_gg, c_pm, c_eg })
}

/// Maps the Dicke-basis state onto the product-basis X state.
pub fn collective_to_product(s: &CollectiveState) -> Result<XState, DynamicsError> {
    let half_sum = 0.5 * (s.p_pp + s.p_mm);
    let x = XState::new_unchecked(
        s.p_ee,
        half_sum + s.c_pm.re,
        half_sum - s.c_pm.re,
        s.p_gg,
        s.c_eg,
        c(0.5 * (s.p_pp - s.p_mm), s.c_pm.im),
    );
    x.validate().map_err(DynamicsError::ResultNotPsd)?;
    Ok(x)
}

/// Exact inverse of [`collective_to_product`].
pub fn product_to_collective(x: &XState) -> CollectiveState {
    let half_sum = 0.5 * (x.p22 + x.p33);
    CollectiveState {
        p_ee: x.p11,
        p_pp: half_sum + x.c23.re,
        p_mm: half_sum - x.c23.re,
        p_gg: x.p44,
        c_pm: c(0.5 * (x.p22 - x.p33), x.c23.im),
        c_eg: x.c14,
    }
}

/// Precomputed operators for the master equation.
struct Generator {
    /// `S₁⁻`, `S₂⁻`.
    lower: [Mat4; 2],
    hamiltonian: Mat4,
    /// `Σ_ij Γ_ij S_i⁺S_j⁻`.
    decay: Mat4,
    gammas: [[f64; 2]; 2],
}

impl Generator {
    fn new(p: &CollectiveParams) -> Self {
        let id = Mat2::identity();
        let lower = [kron(&lowering(), &id), kron(&id, &lowering())];
        let raise = [lower[0].adjoint(), lower[1].adjoint()];
        let gammas = [[1.0, p.gamma], [p.gamma, 1.0]];
        let hamiltonian = (raise[0] * lower[1] + raise[1] * lower[0]) * re(p.eta);
        let mut decay = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                decay += raise[i] * lower[j] * re(gammas[i][j]);
            }
        }
        Generator { lower, hamiltonian, decay, gammas }
    }

    fn apply(&self, rho: &Mat4) -> Mat4 {
        let minus_i = c(0.0, -1.0);
        let mut out = (self.hamiltonian * rho - rho * self.hamiltonian) * minus_i;
        out -= (rho * self.decay + self.decay * rho) * re(0.5);
        for i in 0..2 {
            for j in 0..2 {
                out += self.lower[j] * rho * self.lower[i].adjoint() * re(self.gammas[i][j]);
            }
        }
        out
    }
}

/// `dρ/dτ` of the collective master equation, in the frame rotating at the
/// atomic transition frequency.
pub fn lindblad_rhs(rho: &DensityMatrix, p: &CollectiveParams) -> Mat4 {
    Generator::new(p).apply(rho.matrix())
}

/// Default step count for [`integrate_rk4`]; resolves the `2η` oscillation.
pub fn default_rk4_steps(tau: f64, eta: f64) -> usize {
    (2000.0 * tau.max(1.0) * eta.abs().max(1.0)).ceil() as usize
}

type VecRho = nalgebra::SVector<C64, 16>;

/// Classical fourth-order Runge–Kutta on the full 4×4 master equation.
pub fn integrate_rk4(rho0: &DensityMatrix, p: &CollectiveParams, tau: f64, steps: usize) -> DensityMatrix {
    assert!(steps >= 1, "integrate_rk4 needs at least one step");
    if tau == 0.0 {
        return rho0.clone();
    }
    let gen = Generator::new(p);
    let h = tau / steps as f64;
    let hc = re(h);
    let half = re(0.5 * h);
    let sixth = re(h / 6.0);
    // The generator is linear, so its nonzero entries are tabulated once as a
    // 16×16 map on the column-major entries of ρ.
    let mut sup = Vec::new();
    for j in 0..16 {
        let mut unit = Mat4::zeros();
        unit[(j % 4, j / 4)] = re(1.0);
        let image = gen.apply(&unit);
        for i in 0..16 {
            let z = image[(i % 4, i / 4)];
            if z != ZERO {
                sup.push((i, j, z));
            }
        }
    }
    let apply = |v: &VecRho| {
        let mut out = VecRho::zeros();
        for &(i, j, z) in &sup {
            out[i] += z * v[j];
        }
        out
    };
    let mut v = VecRho::from_column_slice(rho0.matrix().as_slice());
    for _ in 0..steps {
        let k1 = apply(&v);
        let k2 = apply(&(v + k1 * half));
        let k3 = apply(&(v + k2 * half));
        let k4 = apply(&(v + k3 * hc));
        v += (k1 + (k2 + k3) * re(2.0) + k4) * sixth;
    }
    let rho = Mat4::from_column_slice(v.as_slice());
    DensityMatrix::from_matrix_unchecked(linalg::hermitian_part(&rho))
}
