//! Small unconstrained optimizers used by the searches: BFGS with
//! finite-difference gradients and Levenberg–Marquardt for least squares.

use crate::linalg::solve_real;

#[derive(Clone, Copy, Debug)]
pub struct BfgsOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            grad_tol: 1e-9,
            fd_step: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Central differences with a step relative to `|x_i|`.
pub fn fd_gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = h * (1.0 + x[i].abs());
            let orig = xp[i];
            xp[i] = orig + step;
            let fp = f(&xp);
            xp[i] = orig - step;
            let fm = f(&xp);
            xp[i] = orig;
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

/// Minimizes `f` starting from `x0`.
pub fn minimize_bfgs(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, opts: BfgsOptions) -> Minimum {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut g = fd_gradient(&f, &x, opts.fd_step);
    let mut h = identity(n);
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < opts.grad_tol {
            break;
        }
        let mut dir: Vec<f64> = (0..n).map(|i| -dot(&h[i], &g)).collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            h = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let xt: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            let ft = f(&xt);
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                accepted = Some((xt, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else { break };
        let gn = fd_gradient(&f, &xn, opts.fd_step);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            bfgs_update(&mut h, &s, &y, sy);
        }
        let progress = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        if progress.abs() <= 1e-16 * (1.0 + fx.abs()) {
            break;
        }
    }
    Minimum {
        x,
        value: fx,
        iterations,
    }
}

/// Inverse-Hessian update `H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once the largest residual falls below this.
    pub tol: f64,
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-12,
            fd_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Largest absolute residual at `x`.
    pub residual: f64,
    pub iterations: usize,
}

/// Forward-difference Jacobian, one row per residual.
pub fn fd_jacobian(res: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let r0 = res(x);
    let mut jt = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let step = h * (1.0 + x[i].abs());
        xp[i] = x[i] + step;
        let rp = res(&xp);
        xp[i] = x[i];
        jt.push(
            rp.iter()
                .zip(&r0)
                .map(|(a, b)| (a - b) / step)
                .collect::<Vec<f64>>(),
        );
    }
    (0..r0.len())
        .map(|k| jt.iter().map(|col| col[k]).collect())
        .collect()
}

/// Damped Gauss–Newton on `|res(x)|²`. When there are fewer residuals than
/// unknowns the step is the minimum-norm one, `-Jᵀ (J Jᵀ + λ)⁻¹ r`, so the
/// iterate moves as little as possible towards the zero set.
pub fn levenberg_marquardt(
    res: impl Fn(&[f64]) -> Vec<f64>,
    jac: impl Fn(&[f64]) -> Vec<Vec<f64>>,
    x0: Vec<f64>,
    opts: LmOptions,
) -> LeastSquares {
    let mut x = x0;
    let mut r = res(&x);
    let mut cost = dot(&r, &r);
    let mut lambda = 1e-6;
    let mut iterations = 0;
    let max_abs = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    while iterations < opts.max_iter && max_abs(&r) > opts.tol {
        iterations += 1;
        let j = jac(&x);
        let mut improved = false;
        for _ in 0..30 {
            let Some(step) = damped_step(&j, &r, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + d).collect();
            let rn = res(&xn);
            let cn = dot(&rn, &rn);
            if cn.is_finite() && cn < cost {
                x = xn;
                r = rn;
                cost = cn;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    LeastSquares {
        residual: max_abs(&r),
        x,
        iterations,
    }
}

fn damped_step(j: &[Vec<f64>], r: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let rows = j.len();
    let cols = j.first().map_or(0, Vec::len);
    if rows <= cols {
        let mut a = vec![0.0; rows * rows];
        for p in 0..rows {
            for q in 0..rows {
                a[p * rows + q] = dot(&j[p], &j[q]) + if p == q { lambda } else { 0.0 };
            }
        }
        let z = solve_real(&a, r)?;
        Some(
            (0..cols)
                .map(|c| -(0..rows).map(|p| j[p][c] * z[p]).sum::<f64>())
                .collect(),
        )
    } else {
        let mut a = vec![0.0; cols * cols];
        let mut b = vec![0.0; cols];
        for p in 0..cols {
            for q in 0..cols {
                a[p * cols + q] = (0..rows).map(|k| j[k][p] * j[k][q]).sum::<f64>()
                    + if p == q { lambda } else { 0.0 };
            }
            b[p] = -(0..rows).map(|k| j[k][p] * r[k]).sum::<f64>();
        }
        solve_real(&a, &b)
    }
}
