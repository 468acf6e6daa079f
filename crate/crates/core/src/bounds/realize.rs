//! Spatial scenario realizing given correlator vectors.
//!
//! For real vectors `x`, `y` of unit length and anticommuting Hermitian
//! involutions `γ_i`, the observables `a = Σ x_i γ_i` and `b = Σ y_i γ_iᵀ`
//! square to one and the maximally entangled state `Φ = Σ|ii>/√D` gives
//! `<Φ|a ⊗ b|Φ> = tr(a bᵀ)/D = x·y`. Vectors shorter than one are padded
//! into two extra, mutually orthogonal coordinates.

use crate::error::{Error, Result};
use crate::linalg::{sigma_x, sigma_y, sigma_z, ComplexMatrix, C64};
use crate::operator::{DichotomicObservable, PureState};
use crate::scenario::{CorrelatorMatrix, SpatialScenario};

const NORM_TOL: f64 = 1e-9;

/// Jordan–Wigner generators on `qubits` qubits, `2 * qubits` of them.
pub fn clifford_generators(qubits: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * qubits);
    for j in 0..qubits {
        for tail in [sigma_x(), sigma_y()] {
            let mut m = ComplexMatrix::identity(1);
            for i in 0..qubits {
                let f = match i.cmp(&j) {
                    std::cmp::Ordering::Less => sigma_z(),
                    std::cmp::Ordering::Equal => tail.clone(),
                    std::cmp::Ordering::Greater => ComplexMatrix::identity(2),
                };
                m = m.kron(&f);
            }
            out.push(m);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the span of `vs` by modified Gram–Schmidt.
fn span_basis(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for e in &basis {
            let c = dot(e, &w);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * ei;
            }
        }
        let n = dot(&w, &w).sqrt();
        if n > 1e-10 {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Two-party scenario whose correlators are `<x_k, y_l>`. The vectors must
/// lie in the unit ball; the local dimension is `2^{ceil((q+2)/2)}` with `q`
/// the smaller of the two spans' dimensions.
pub fn realize_spatial(alice: &[Vec<f64>], bob: &[Vec<f64>]) -> Result<SpatialScenario> {
    if alice.is_empty() || bob.is_empty() {
        return Err(Error::Shape("need at least one vector per party".into()));
    }
    let d = alice[0].len();
    for v in alice.iter().chain(bob) {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if dot(v, v).sqrt() > 1.0 + NORM_TOL {
            return Err(Error::Shape("vectors must lie in the unit ball".into()));
        }
    }
    // coordinates in the smaller span; projecting the other side onto it
    // keeps every inner product
    let (sa, sb) = (span_basis(alice), span_basis(bob));
    let basis = if sb.len() <= sa.len() { sb } else { sa };
    let coords = |v: &Vec<f64>| -> Vec<f64> { basis.iter().map(|e| dot(e, v)).collect() };
    let q = basis.len();
    let qubits = (q + 2).div_ceil(2);
    let gammas = clifford_generators(qubits);
    let dim = 1usize << qubits;

    let build = |v: &Vec<f64>, slot: usize, transpose: bool| -> DichotomicObservable {
        let mut c = coords(v);
        let rest = (1.0 - dot(&c, &c)).max(0.0).sqrt();
        c.resize(2 * qubits, 0.0);
        c[q + slot] = rest;
        let mut m = ComplexMatrix::zeros(dim);
        for (ci, g) in c.iter().zip(&gammas) {
            if *ci != 0.0 {
                let g = if transpose { g.transpose() } else { g.clone() };
                m = &m + &g.scale_real(*ci);
            }
        }
        // renormalize away rounding in |c|
        let n = dot(&c, &c).sqrt();
        DichotomicObservable::with_tolerance(m.scale_real(1.0 / n).hermitize(), 1e-8)
            .expect("unit Clifford combinations are involutions")
    };
    let a: Vec<DichotomicObservable> = alice.iter().map(|v| build(v, 0, false)).collect();
    let b: Vec<DichotomicObservable> = bob.iter().map(|v| build(v, 1, true)).collect();

    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    let w = 1.0 / (dim as f64).sqrt();
    for i in 0..dim {
        amps[i * dim + i] = C64::new(w, 0.0);
    }
    SpatialScenario::new(PureState::new(amps)?, a, b)
}

/// Realizes a quantum-feasible correlator matrix, or reports why not.
pub fn realize_correlators(c: &CorrelatorMatrix) -> Result<SpatialScenario> {
    let sol = super::gram::solve(c);
    if !sol.feasible {
        return Err(Error::Shape(format!(
            "correlator matrix is not quantum realizable (residual {:e})",
            sol.residual
        )));
    }
    realize_spatial(&sol.alice, &sol.bob)
}
