//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order together with the unitary whose
/// columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let d = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for (k, &f) in fv.iter().enumerate() {
                    acc += self.vectors[(i, k)] * f * self.vectors[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Diagonalizes a Hermitian matrix, `A = V diag(values) V^dagger`.
///
/// Inputs deviating from Hermitian by more than `tol` (Frobenius) are
/// rejected; the remaining anti-Hermitian part is discarded.
pub fn hermitian_eigensystem(a: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    let residual = a.hermitian_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(jacobi(&a.hermitize()))
}

fn off_diagonal_sqr(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

fn jacobi(input: &ComplexMatrix) -> Eigensystem {
    let d = input.dim();
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(d);
    let total = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON * total;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_sqr(&a).sqrt() <= eps {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag < 0.1 * eps / (d as f64) {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..d {
            vectors[(i, new)] = v[(i, old)];
        }
    }
    Eigensystem { values, vectors }
}

/// Annihilates `a[p][q]` with `G = D R`, where `D` removes the phase of
/// `a[p][q]` and `R` is a real Jacobi rotation. Updates `a <- G^† a G` and
/// `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, mag: f64) {
    let d = a.dim();
    let phase = apq / mag; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    for i in 0..d {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * g_pp + aiq * g_qp;
        a[(i, q)] = aip * g_pq + aiq * g_qq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * g_pp + viq * g_qp;
        v[(i, q)] = vip * g_pq + viq * g_qq;
    }
    for j in 0..d {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
        a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
}
