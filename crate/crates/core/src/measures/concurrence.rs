use crate::linalg::{pauli_product, Mat4};
use crate::qstate::{hermitian_sqrt_generic, DensityMatrix};

use super::{clamp_measure, MeasureError};

/// `(σ_y⊗σ_y) m* (σ_y⊗σ_y)`.
pub fn spin_flip(m: &Mat4) -> Mat4 {
    let yy = pauli_product(2, 2);
    yy * m.conjugate() * yy
}

/// Square roots of the eigenvalues of `ρρ̃`, descending.
///
/// They are the singular values of `√ρ·√ρ̃`, which is how they are computed:
/// small values come out with absolute rather than square-root accuracy.
pub fn wootters_roots(rho: &DensityMatrix) -> Result<[f64; 4], MeasureError> {
    let root = hermitian_sqrt_generic(rho)?;
    let m = root * spin_flip(&root);
    let sv = m.svd(false, false).singular_values;
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let s = wootters_roots(rho)?;
    Ok(clamp_measure((s[0] - s[1] - s[2] - s[3]).max(0.0)))
}
