//! Small dense linear algebra on two-qubit operators.
//!
//! Everything here works on fixed 4×4 complex matrices in the product basis
//! `{|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩}`. A single qubit uses `{|e⟩, |g⟩}`, so
//! `σ_z|e⟩ = +|e⟩`.

use nalgebra::{Complex, Matrix2, Matrix4};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Pauli matrix `σ_α`, with `σ₀` the identity.
pub fn pauli(alpha: usize) -> Mat2 {
    match alpha {
        0 => Mat2::new(ONE, ZERO, ZERO, ONE),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {alpha} out of range"),
    }
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `σ_α ⊗ σ_β`.
pub fn pauli_product(alpha: usize, beta: usize) -> Mat4 {
    kron(&pauli(alpha), &pauli(beta))
}

/// Single-qubit lowering operator `|g⟩⟨e|`.
pub fn lowering() -> Mat2 {
    Mat2::new(ZERO, ZERO, ONE, ZERO)
}

pub fn trace(m: &Mat4) -> C64 {
    m[(0, 0)] + m[(1, 1)] + m[(2, 2)] + m[(3, 3)]
}

/// `Tr(a·b)` without forming the product.
pub fn trace_of_product(a: &Mat4, b: &Mat4) -> C64 {
    let mut acc = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    max_abs(&(a - b))
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn hermiticity_defect(m: &Mat4) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &Mat4) -> Mat4 {
    (m + m.adjoint()) * re(0.5)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: [f64; 4],
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Mat4,
}

impl HermitianEigen {
    /// Rebuilds `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Mat4 {
        let mut out = Mat4::zeros();
        for k in 0..4 {
            let w = f(self.values[k]);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization of a Hermitian 4×4 matrix.
///
/// Only the Hermitian part of `m` is used. Rotations are skipped on pairs whose
/// coupling is already zero, so block structure (e.g. X states) survives
/// exactly and structurally zero eigenvalues come out as exact zeros.
pub fn hermitian_eigen(m: &Mat4) -> HermitianEigen {
    let mut a = hermitian_part(m);
    for k in 0..4 {
        a[(k, k)] = re(a[(k, k)].re);
    }
    let mut v = Mat4::identity();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let scale = (app.abs() * aqq.abs()).sqrt();
                if mag <= f64::EPSILON * 1e-2 * scale || mag < 1e-300 {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;

                // Phase first, then a real symmetric rotation:
                // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]].
                let phase = apq / mag;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                let u_pp = re(cs);
                let u_pq = re(sn);
                let u_qp = ph * (-sn);
                let u_qq = ph * cs;

                for k in 0..4 {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..4 {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, p)] = re(app - t * mag);
                a[(q, q)] = re(aqq + t * mag);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;

                for k in 0..4 {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.map(|k| a[(k, k)].re);
    let vectors = Mat4::from_fn(|i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Schatten 1-norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &Mat4) -> f64 {
    hermitian_eigen(m).values.iter().map(|x| x.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn random_hermitian(entries: &[f64]) -> Mat4 {
        let mut m = Mat4::zeros();
        let mut it = entries.iter();
        for i in 0..4 {
            m[(i, i)] = re(*it.next().unwrap());
            for j in (i + 1)..4 {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        assert_eq!(x * y, z * I);
        assert_eq!(pauli_product(3, 0)[(1, 1)], ONE);
        assert_eq!(pauli_product(3, 0)[(2, 2)], -ONE);
    }

    #[test]
    fn lowering_takes_excited_to_ground() {
        let s = lowering();
        assert_eq!(s[(1, 0)], ONE);
        assert_eq!(s[(0, 1)], ZERO);
    }

    #[test]
    fn block_zeros_survive_exactly() {
        let mut m = Mat4::zeros();
        m[(1, 1)] = re(0.3);
        m[(2, 2)] = re(0.2);
        m[(1, 2)] = c(0.1, -0.05);
        m[(2, 1)] = c(0.1, 0.05);
        m[(3, 3)] = re(0.5);
        let eig = hermitian_eigen(&m);
        assert_eq!(eig.values[0], 0.0);
        let sqrt = eig.map_spectrum(|x| x.max(0.0).sqrt());
        assert_eq!(sqrt[(0, 0)], ZERO);
        assert_eq!(sqrt[(0, 3)], ZERO);
        assert_eq!(sqrt[(1, 3)], ZERO);
    }

    proptest! {
        #[test]
        fn jacobi_matches_nalgebra(entries in prop::collection::vec(-1.0f64..1.0, 16)) {
            let m = random_hermitian(&entries);
            let ours = hermitian_eigen(&m);
            let mut theirs: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for k in 0..4 {
                prop_assert!((ours.values[k] - theirs[k]).abs() < 1e-12);
            }
            let rebuilt = ours.map_spectrum(|x| x);
            prop_assert!(max_abs_diff(&rebuilt, &m) < 1e-12);
        }
    }
}
