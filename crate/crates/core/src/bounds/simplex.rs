//! Dense phase-1 simplex: finds `x >= 0` with `A x = b` or certifies that
//! none exists.

/// Outcome of phase 1.
#[derive(Clone, Debug)]
pub struct PhaseOne {
    pub feasible: bool,
    /// A basic feasible point when `feasible`, otherwise the last iterate.
    pub x: Vec<f64>,
    /// Optimal sum of artificial variables, the L1 distance from `b` to the
    /// cone `{A x : x >= 0}` along the artificial directions.
    pub infeasibility: f64,
    pub pivots: usize,
}

const PIVOT_TOL: f64 = 1e-11;
const FEASIBLE_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching from Dantzig's
/// rule to Bland's rule, which cannot cycle.
const DEGENERATE_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 200_000;

/// `a` is given row by row; all rows must share one length.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let rows = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(rows, b.len());
    // tableau: n structural columns, `rows` artificial columns, rhs
    let width = n + rows + 1;
    let mut t = vec![0.0; rows * width];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = sign * a[i][j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + width - 1] = sign * b[i];
    }
    // reduced costs of `min sum(artificials)`
    let mut cost = vec![0.0; width];
    for i in 0..rows {
        for j in 0..n {
            cost[j] -= t[i * width + j];
        }
        cost[width - 1] -= t[i * width + width - 1];
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();
    let mut pivots = 0;
    let mut degenerate = 0;
    let mut bland = false;

    while pivots < MAX_PIVOTS {
        // entering column among the structural ones; artificials never re-enter
        let mut enter = None;
        let mut best = -PIVOT_TOL;
        for (j, &c) in cost.iter().enumerate().take(n) {
            if c < best {
                enter = Some(j);
                if bland {
                    break;
                }
                best = c;
            }
        }
        let Some(e) = enter else { break };

        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for i in 0..rows {
            let v = t[i * width + e];
            if v > PIVOT_TOL {
                let r = t[i * width + width - 1] / v;
                let better = match leave {
                    None => true,
                    Some(l) => r < ratio - 1e-15 || (r <= ratio + 1e-15 && basis[i] < basis[l]),
                };
                if better {
                    ratio = r;
                    leave = Some(i);
                }
            }
        }
        // phase 1 is bounded below by zero, so some row always qualifies
        let Some(l) = leave else { break };

        if ratio <= 1e-14 {
            degenerate += 1;
            if degenerate > DEGENERATE_LIMIT {
                bland = true;
            }
        } else {
            degenerate = 0;
        }
        pivot(&mut t, &mut cost, width, l, e);
        basis[l] = e;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i * width + width - 1].max(0.0);
        }
    }
    let infeasibility = (-cost[width - 1]).max(0.0);
    PhaseOne {
        feasible: infeasibility <= FEASIBLE_TOL,
        x,
        infeasibility,
        pivots,
    }
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, l: usize, e: usize) {
    let p = t[l * width + e];
    for j in 0..width {
        t[l * width + j] /= p;
    }
    let (before, rest) = t.split_at_mut(l * width);
    let (prow, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [f64]| {
        let f = row[e];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            row[e] = 0.0;
        }
    };
    for row in before.chunks_mut(width).chain(after.chunks_mut(width)) {
        eliminate(row);
    }
    eliminate(cost);
}
