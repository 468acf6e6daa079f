//! Quantum realizability of a correlator matrix: do vectors `x_k`, `y_l`
//! in the unit ball exist with `<x_k, y_l> = C_kl`?
//!
//! Equivalently, is there a PSD matrix `[[X, C], [Cᵀ, Y]]` with diagonal at
//! most one. Dykstra's alternating projections between the PSD cone and
//! the affine set decide most instances. Near the boundary of the feasible
//! set they converge sublinearly, so every run ends with a Levenberg–
//! Marquardt polish in factor space, on unit vectors `u_i/|u_i|`, which has
//! exact solutions whenever the problem is feasible (a diagonal below one
//! can always be padded up to one in an extra dimension).

use crate::linalg::{hermitian_eigensystem, ComplexMatrix, C64};
use crate::optim::{levenberg_marquardt, LmOptions};
use crate::random::{random_unit_vector, rng_from_seed};
use crate::scenario::CorrelatorMatrix;

pub const DYKSTRA_MAX_ITER: usize = 10_000;
/// Dykstra stops once the two iterates are this close.
pub const DYKSTRA_TOL: f64 = 1e-10;
/// Iterations without a 1% improvement that count as a stall.
pub const STALL_WINDOW: usize = 500;
/// Largest block error of an accepted certificate.
pub const BLOCK_TOL: f64 = 1e-8;
pub const MARGINAL_BAND: (f64, f64) = (1e-7, 1e-5);
const POLISH_STARTS: u64 = 6;

#[derive(Clone, Debug)]
pub struct GramSolution {
    pub feasible: bool,
    /// Block error of the certificate when feasible, otherwise the final
    /// distance between the Dykstra iterates.
    pub residual: f64,
    pub gram: Vec<Vec<f64>>,
    /// Unit vectors, Alice's first.
    pub alice: Vec<Vec<f64>>,
    pub bob: Vec<Vec<f64>>,
    pub dykstra_iterations: usize,
}

impl GramSolution {
    pub fn marginal(&self) -> bool {
        (MARGINAL_BAND.0..=MARGINAL_BAND.1).contains(&self.residual)
    }
}

type Sym = Vec<Vec<f64>>;

fn project_psd(a: &Sym) -> Sym {
    let p = a.len();
    let mut m = ComplexMatrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            m[(i, j)] = C64::new(0.5 * (a[i][j] + a[j][i]), 0.0);
        }
    }
    let es = hermitian_eigensystem(&m, 1e-6).expect("symmetric input");
    let r = es.map(|l| C64::new(l.max(0.0), 0.0));
    (0..p)
        .map(|i| (0..p).map(|j| r[(i, j)].re).collect())
        .collect()
}

fn project_affine(a: &Sym, c: &CorrelatorMatrix) -> Sym {
    let (m, n) = (c.m(), c.n());
    let mut out = a.clone();
    for k in 0..m {
        for l in 0..n {
            out[k][m + l] = c.get(k, l);
            out[m + l][k] = c.get(k, l);
        }
    }
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = row[i].min(1.0);
    }
    out
}

fn frobenius_distance(a: &Sym, b: &Sym) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn combine(a: &Sym, b: &Sym, sign: f64) -> Sym {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + sign * y).collect())
        .collect()
}

/// Dykstra iteration; returns the last PSD iterate, the final gap and the
/// iteration count.
fn dykstra(c: &CorrelatorMatrix) -> (Sym, f64, usize) {
    let (m, n) = (c.m(), c.n());
    let size = m + n;
    let mut x: Sym = (0..size)
        .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    x = project_affine(&x, c);
    let zero: Sym = vec![vec![0.0; size]; size];
    let (mut p, mut q) = (zero.clone(), zero);
    let mut y = x.clone();
    let mut gap = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    let mut it = 0;
    while it < DYKSTRA_MAX_ITER {
        it += 1;
        let xp = combine(&x, &p, 1.0);
        y = project_psd(&xp);
        p = combine(&xp, &y, -1.0);
        let yq = combine(&y, &q, 1.0);
        x = project_affine(&yq, c);
        q = combine(&yq, &x, -1.0);
        gap = frobenius_distance(&x, &y);
        if gap < DYKSTRA_TOL {
            break;
        }
        if gap < 0.99 * best {
            best = gap;
            best_at = it;
        } else if it - best_at > STALL_WINDOW {
            break;
        }
    }
    (y, gap, it)
}

/// Rows of `V sqrt(Λ)` for the PSD matrix `g`.
fn factor(g: &Sym) -> Vec<Vec<f64>> {
    let p = g.len();
    let mut m = ComplexMatrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            m[(i, j)] = C64::new(g[i][j], 0.0);
        }
    }
    let es = hermitian_eigensystem(&m, 1e-6).expect("symmetric input");
    (0..p)
        .map(|i| {
            (0..p)
                .map(|k| es.vectors[(i, k)].re * es.values[k].max(0.0).sqrt())
                .collect()
        })
        .collect()
}

fn normalize(v: &[f64]) -> (Vec<f64>, f64) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (v.iter().map(|x| x / n).collect(), n)
}

/// Minimizes `sum (x̂_k·ŷ_l - C_kl)²` over the raw vectors.
fn polish(c: &CorrelatorMatrix, start: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, f64) {
    let (m, n) = (c.m(), c.n());
    let dim = start[0].len();
    let x0: Vec<f64> = start.into_iter().flatten().collect();
    let units = |x: &[f64]| -> Vec<(Vec<f64>, f64)> { x.chunks(dim).map(normalize).collect() };
    let res = |x: &[f64]| {
        let u = units(x);
        let mut r = Vec::with_capacity(m * n);
        for k in 0..m {
            for l in 0..n {
                r.push(dot(&u[k].0, &u[m + l].0) - c.get(k, l));
            }
        }
        r
    };
    let jac = |x: &[f64]| {
        let u = units(x);
        let mut rows = Vec::with_capacity(m * n);
        for k in 0..m {
            for l in 0..n {
                let mut row = vec![0.0; x.len()];
                let (xk, nk) = (&u[k].0, u[k].1);
                let (yl, nl) = (&u[m + l].0, u[m + l].1);
                let ip = dot(xk, yl);
                for t in 0..dim {
                    row[k * dim + t] = (yl[t] - ip * xk[t]) / nk;
                    row[(m + l) * dim + t] = (xk[t] - ip * yl[t]) / nl;
                }
                rows.push(row);
            }
        }
        rows
    };
    let out = levenberg_marquardt(
        res,
        jac,
        x0,
        LmOptions {
            max_iter: 300,
            tol: 1e-13,
            fd_step: 0.0,
        },
    );
    let vectors = out.x.chunks(dim).map(|v| normalize(v).0).collect();
    (vectors, out.residual)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nudges rows too short to normalize along fixed pseudo-random directions.
fn regularize(rows: &mut [Vec<f64>], seed: u64) {
    let mut rng = rng_from_seed(seed);
    for row in rows.iter_mut() {
        let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        let fresh = random_unit_vector(row.len(), &mut rng);
        if n < 1e-6 {
            for (v, f) in row.iter_mut().zip(&fresh) {
                *v += 1e-3 * f;
            }
        }
    }
}

fn block_error(c: &CorrelatorMatrix, alice: &[Vec<f64>], bob: &[Vec<f64>]) -> f64 {
    let mut err = 0.0f64;
    for (k, x) in alice.iter().enumerate() {
        for (l, y) in bob.iter().enumerate() {
            err = err.max((dot(x, y) - c.get(k, l)).abs());
        }
    }
    err
}

pub fn solve(c: &CorrelatorMatrix) -> GramSolution {
    let (m, n) = (c.m(), c.n());
    let size = m + n;
    let (y, gap, dykstra_iterations) = dykstra(c);

    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for attempt in 0..POLISH_STARTS {
        let mut start = if attempt == 0 {
            factor(&y)
        } else {
            let mut rng = rng_from_seed(0x5eed_0000 + attempt);
            (0..size)
                .map(|_| random_unit_vector(size, &mut rng))
                .collect()
        };
        regularize(&mut start, attempt);
        let (vectors, r) = polish(c, start);
        if best.as_ref().is_none_or(|b| r < b.1) {
            best = Some((vectors, r));
        }
        if r < BLOCK_TOL {
            break;
        }
        // Dykstra already certified a clear gap: random restarts cannot help
        if gap > 1e-3 && attempt == 0 {
            break;
        }
    }
    let (mut vectors, _) = best.expect("at least one polish");
    if block_error(c, &vectors[..m], &vectors[m..]) >= BLOCK_TOL && gap < DYKSTRA_TOL {
        // the PSD iterate itself is a certificate, with norms at most 1 + gap
        vectors = factor(&y);
    }
    let alice = vectors[..m].to_vec();
    let bob = vectors[m..].to_vec();
    let err = block_error(c, &alice, &bob);
    let gram = vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dot(u, v)).collect())
        .collect();
    let feasible = err < BLOCK_TOL;
    GramSolution {
        feasible,
        residual: if feasible { err } else { gap },
        gram,
        alice,
        bob,
        dykstra_iterations,
    }
}

/// Smallest eigenvalue of a symmetric matrix, clipped above at zero, negated.
pub fn psd_residual(g: &[Vec<f64>]) -> f64 {
    let p = g.len();
    let mut m = ComplexMatrix::zeros(p);
    for i in 0..p {
        for j in 0..p {
            m[(i, j)] = C64::new(0.5 * (g[i][j] + g[j][i]), 0.0);
        }
    }
    let es = hermitian_eigensystem(&m, 1e-6).expect("symmetric input");
    (-es.values.last().copied().unwrap_or(0.0)).max(0.0)
}
