//! Hardy's paradox for sequential measurements.
//!
//! The joint probabilities `P(+1,+1|1,1)`, `P(-1,+1|1,2)` and
//! `P(+1,-1|2,1)` vanish while `P(+1,+1|2,2)` stays positive. A probability
//! `P(r,s|k,l)` vanishes exactly when the amplitude vector
//! `(1 + s b_l)(1 + r a_k)|psi>` does, because its squared norm is
//! `16 P(r,s|k,l)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::hv_table_feasible;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::operator::{DichotomicObservable, Outcome, PureState};
use crate::optim::{fd_jacobian, levenberg_marquardt, minimize_bfgs, BfgsOptions, LmOptions};
use crate::param::{
    frame_observable, frame_parameter_count, gaussian_reals, state_from_reals,
    state_parameter_count, Layout,
};
use crate::random::{rng_from_seed, sub_seed};
use crate::scenario::{full_table, SpatialScenario, TemporalScenario};

pub const DEFAULT_TOL: f64 = 1e-8;

/// `(r, s, k, l)` of the three outcomes that must never occur together.
pub const HARDY_ZEROS: [(Outcome, Outcome, usize, usize); 3] = [
    (Outcome::Plus, Outcome::Plus, 0, 0),
    (Outcome::Minus, Outcome::Plus, 0, 1),
    (Outcome::Plus, Outcome::Minus, 1, 0),
];

#[derive(Clone, Debug, Serialize)]
pub struct HardyReport {
    /// Norms of the three amplitude vectors, in the order of [`HARDY_ZEROS`].
    pub constraint_residuals: [f64; 3],
    /// `P(+1,+1|2,2)`.
    pub paradox_value: f64,
    pub constraints_satisfied: bool,
    pub hv_infeasible: bool,
}

impl HardyReport {
    pub fn max_residual(&self) -> f64 {
        self.constraint_residuals
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// `(1 + s b)(1 + r a) v`.
fn amplitude(a: &ComplexMatrix, b: &ComplexMatrix, r: Outcome, s: Outcome, v: &[C64]) -> Vec<C64> {
    let shift = |m: &ComplexMatrix, sign: f64, v: &[C64]| -> Vec<C64> {
        linalg::add_vec(v, &linalg::scale_vec(&m.apply(v), C64::new(sign, 0.0)))
    };
    shift(b, s.sign(), &shift(a, r.sign(), v))
}

/// Amplitudes of the three zeros and of the paradoxical event, for
/// `ops = [a1, a2, b1, b2]`.
fn hardy_amplitudes(psi: &[C64], ops: &[ComplexMatrix; 4]) -> ([Vec<C64>; 3], Vec<C64>) {
    let zeros = HARDY_ZEROS.map(|(r, s, k, l)| amplitude(&ops[k], &ops[2 + l], r, s, psi));
    let paradox = amplitude(&ops[1], &ops[3], Outcome::Plus, Outcome::Plus, psi);
    (zeros, paradox)
}

/// Constraint residuals and paradox value of a 2x2 scenario. Dynamics, if
/// any, are folded into Bob's observables.
pub fn hardy_check(scenario: &TemporalScenario, tol: f64) -> Result<HardyReport> {
    if (scenario.m(), scenario.n()) != (2, 2) {
        return Err(Error::Shape(format!(
            "Hardy check needs two settings per party, found {}x{}",
            scenario.m(),
            scenario.n()
        )));
    }
    let ops = [
        scenario.alice()[0].matrix().clone(),
        scenario.alice()[1].matrix().clone(),
        scenario.evolved_bob(0)?.matrix().clone(),
        scenario.evolved_bob(1)?.matrix().clone(),
    ];
    let (zeros, _) = hardy_amplitudes(scenario.psi().amplitudes(), &ops);
    let constraint_residuals = zeros.map(|z| linalg::norm(&z));
    let table = full_table(scenario)?;
    let paradox_value = table.get(Outcome::Plus, Outcome::Plus, 1, 1);
    let constraints_satisfied = constraint_residuals.iter().all(|&r| r < tol);
    let hv_infeasible =
        constraints_satisfied && paradox_value > tol && !hv_table_feasible(&table)?.feasible;
    Ok(HardyReport {
        constraint_residuals,
        paradox_value,
        constraints_satisfied,
        hv_infeasible,
    })
}

/// `|<psi|(1 + a1)(1 + a2)|psi>|`. It vanishes exactly when some `b1`
/// satisfies the first and third zero conditions.
pub fn hardy_orthogonality_check(
    psi: &PureState,
    a1: &DichotomicObservable,
    a2: &DichotomicObservable,
) -> f64 {
    let v = psi.amplitudes();
    let shift = |a: &DichotomicObservable| linalg::add_vec(v, &a.matrix().apply(v));
    linalg::inner(&shift(a1), &shift(a2)).norm()
}

fn unit(v: &[C64]) -> Option<Vec<C64>> {
    let n = linalg::norm(v);
    (n > 1e-12).then(|| linalg::scale_vec(v, C64::new(1.0 / n, 0.0)))
}

/// Completes `(psi, a1, a2)` to a scenario meeting all three zero
/// conditions when [`hardy_orthogonality_check`] is below `tol`: `b1` flips
/// the direction of `(1 + a1)psi` and keeps everything orthogonal to it,
/// and `b2` flips `(1 - a1)psi`.
pub fn complete_hardy(
    psi: &PureState,
    a1: &DichotomicObservable,
    a2: &DichotomicObservable,
    tol: f64,
) -> Option<TemporalScenario> {
    if hardy_orthogonality_check(psi, a1, a2) >= tol {
        return None;
    }
    let d = psi.dim();
    let v = psi.amplitudes();
    let w = linalg::add_vec(v, &a1.matrix().apply(v));
    let u = linalg::sub_vec(v, &a1.matrix().apply(v));
    let x = linalg::add_vec(v, &a2.matrix().apply(v));
    let reflect = |e: &[C64]| {
        DichotomicObservable::with_tolerance(
            &ComplexMatrix::identity(d) - &ComplexMatrix::outer(e, e).scale_real(2.0),
            1e-8,
        )
        .expect("reflections are involutions")
    };
    let b1 = match (unit(&w), unit(&x)) {
        (Some(e), _) => reflect(&e),
        // no vector to flip: make (1 + a2)psi a +1 eigenvector instead
        (None, Some(e)) => reflect(&e).negated(),
        (None, None) => DichotomicObservable::identity(d),
    };
    let b2 = unit(&u).map_or_else(|| DichotomicObservable::identity(d), |e| reflect(&e));
    TemporalScenario::new(
        psi.clone(),
        vec![a1.clone(), a2.clone()],
        vec![b1, b2],
        None,
    )
    .ok()
}

#[derive(Clone, Debug)]
pub struct HardyOptimum<S> {
    pub value: f64,
    pub report: HardyReport,
    pub scenario: S,
}

const PENALTY_STAGES: usize = 6;
const INITIAL_WEIGHT: f64 = 10.0;

/// Quadratic-penalty maximization of the paradox probability, weight times
/// ten per stage, then a minimum-norm Gauss–Newton projection back onto the
/// zero set of the constraint amplitudes.
fn penalty_search(
    x0: Vec<f64>,
    ops: impl Fn(&[f64]) -> (Vec<C64>, [ComplexMatrix; 4]),
) -> Vec<f64> {
    let mut x = x0;
    let mut weight = INITIAL_WEIGHT;
    for _ in 0..PENALTY_STAGES {
        let f = |p: &[f64]| {
            let (psi, m) = ops(p);
            let (zeros, paradox) = hardy_amplitudes(&psi, &m);
            let penalty: f64 = zeros.iter().map(|z| linalg::norm_sqr(z)).sum();
            (weight * penalty - linalg::norm_sqr(&paradox)) / 16.0
        };
        x = minimize_bfgs(
            f,
            x,
            BfgsOptions {
                max_iter: 300,
                ..Default::default()
            },
        )
        .x;
        weight *= 10.0;
    }
    let res = |p: &[f64]| -> Vec<f64> {
        let (psi, m) = ops(p);
        let (zeros, _) = hardy_amplitudes(&psi, &m);
        zeros.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
    };
    let jac = |p: &[f64]| fd_jacobian(&res, p, 1e-7);
    levenberg_marquardt(res, jac, x, LmOptions::default()).x
}

/// Best run: highest value among those meeting the constraints at
/// `DEFAULT_TOL`, otherwise the least infeasible.
fn best_run<S>(runs: Vec<HardyOptimum<S>>) -> HardyOptimum<S> {
    let key = |r: &HardyOptimum<S>| {
        let feasible = r.report.max_residual() < DEFAULT_TOL;
        (
            feasible,
            if feasible {
                r.value
            } else {
                -r.report.max_residual()
            },
        )
    };
    runs.into_iter()
        .reduce(|a, b| if key(&b) > key(&a) { b } else { a })
        .expect("at least one run")
}

/// Maximizes `P(+1,+1|2,2)` over temporal scenarios on `C^dim` without
/// dynamics, subject to the three zero conditions.
pub fn hardy_max_temporal(
    dim: usize,
    restarts: usize,
    seed: u64,
) -> HardyOptimum<TemporalScenario> {
    assert!(dim >= 2, "Hardy search needs dim >= 2");
    let runs = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(sub_seed(seed, i as u64));
            let ranks: Vec<usize> = (0..4)
                .map(|_| rand::Rng::random_range(&mut rng, 1..dim))
                .collect();
            let layout = Layout::new(dim, ranks);
            let x0 = gaussian_reals(layout.len(), &mut rng);
            let x = penalty_search(x0, |p| {
                (
                    layout.state(p),
                    std::array::from_fn(|j| layout.observable(p, j)),
                )
            });
            let (psi, obs) = layout.decode(&x);
            let [a1, a2, b1, b2]: [DichotomicObservable; 4] =
                obs.try_into().expect("four observables");
            let scenario = TemporalScenario::new(psi, vec![a1, a2], vec![b1, b2], None)
                .expect("same dimension");
            let report = hardy_check(&scenario, DEFAULT_TOL).expect("2x2 scenario");
            HardyOptimum {
                value: report.paradox_value,
                report,
                scenario,
            }
        })
        .collect();
    best_run(runs)
}

/// The same maximization for two qubits, Alice acting on the first factor
/// and Bob on the second.
pub fn hardy_max_spatial(restarts: usize, seed: u64) -> HardyOptimum<SpatialScenario> {
    let id = ComplexMatrix::identity(2);
    let runs = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(sub_seed(seed, i as u64));
            // joint state on C^4, then four rank-one qubit frames
            let split = state_parameter_count(4);
            let width = frame_parameter_count(2, 1);
            let x0 = gaussian_reals(split + 4 * width, &mut rng);
            let qubit =
                |f: &[f64], j: usize| frame_observable(2, 1, &f[j * width..(j + 1) * width]);
            let x = penalty_search(x0, |p| {
                let (s, f) = p.split_at(split);
                let ops = std::array::from_fn(|j| {
                    if j < 2 {
                        qubit(f, j).kron(&id)
                    } else {
                        id.kron(&qubit(f, j))
                    }
                });
                (state_from_reals(s), ops)
            });
            let (s, f) = x.split_at(split);
            let psi = PureState::new_unchecked(state_from_reals(s));
            let obs: Vec<DichotomicObservable> = (0..4)
                .map(|j| DichotomicObservable::new_unchecked(qubit(f, j).hermitize()))
                .collect();
            let scenario = SpatialScenario::new(psi, obs[..2].to_vec(), obs[2..].to_vec())
                .expect("qubit pair");
            let report = hardy_check(&scenario.to_temporal(), DEFAULT_TOL).expect("2x2 scenario");
            HardyOptimum {
                value: report.paradox_value,
                report,
                scenario,
            }
        })
        .collect();
    best_run(runs)
}

/// `(5 sqrt 5 - 11)/2`, the largest Hardy probability for two qubits.
pub fn spatial_hardy_optimum() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / 2.0
}

/// `psi = |x+>`, `a1 = -sigma_x`, `a2 = sigma_y`, `b1 = sigma_y`,
/// `b2 = -sigma_x`.
pub fn hardy_protocol() -> TemporalScenario {
    use crate::operator::{pauli_observable, x_plus};
    let (x, y) = (pauli_observable('x'), pauli_observable('y'));
    TemporalScenario::new(
        x_plus(),
        vec![x.negated(), y.clone()],
        vec![y, x.negated()],
        None,
    )
    .expect("qubit protocol")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_observable;
    use crate::random::{random_observable, random_scenario, random_state};
    use crate::scenario::temporal_joint;

    #[test]
    fn protocol_is_a_paradox() {
        let r = hardy_check(&hardy_protocol(), DEFAULT_TOL).unwrap();
        assert!(r.max_residual() < 1e-12);
        assert!((r.paradox_value - 0.25).abs() < 1e-12);
        assert!(r.constraints_satisfied && r.hv_infeasible);
    }

    #[test]
    fn all_sigma_z_is_not_a_paradox() {
        // |1> is the -1 eigenvector, so every constraint amplitude vanishes
        let z = pauli_observable('z');
        let sc = TemporalScenario::new(
            PureState::basis(2, 1),
            vec![z.clone(), z.clone()],
            vec![z.clone(), z],
            None,
        )
        .unwrap();
        let r = hardy_check(&sc, DEFAULT_TOL).unwrap();
        assert_eq!(r.constraint_residuals, [0.0; 3]);
        assert!(r.paradox_value.abs() < 1e-15);
        let flipped = sc.with_psi(PureState::basis(2, 0)).unwrap();
        assert_eq!(
            hardy_check(&flipped, DEFAULT_TOL)
                .unwrap()
                .constraint_residuals[0],
            4.0
        );
        assert!(!r.hv_infeasible);
    }

    #[test]
    fn residuals_are_four_times_root_probabilities() {
        let mut rng = rng_from_seed(61);
        for i in 0..200 {
            let sc = random_scenario(2 + i % 4, 2, 2, i % 2 == 0, &mut rng);
            let r = hardy_check(&sc, DEFAULT_TOL).unwrap();
            for (res, (rr, s, k, l)) in r.constraint_residuals.iter().zip(HARDY_ZEROS) {
                let p = temporal_joint(&sc, k, l).unwrap().get(rr, s);
                assert!((res * res / 16.0 - p).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let z = pauli_observable('z');
        let sc = TemporalScenario::new(
            PureState::basis(2, 0),
            vec![z.clone()],
            vec![z.clone(), z],
            None,
        )
        .unwrap();
        assert!(matches!(
            hardy_check(&sc, DEFAULT_TOL),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn orthogonality_examples() {
        let sc = hardy_protocol();
        assert!(hardy_orthogonality_check(sc.psi(), &sc.alice()[0], &sc.alice()[1]) < 1e-15);
        let z = pauli_observable('z');
        assert!(hardy_orthogonality_check(&PureState::basis(2, 0), &z, &z) > 1.0);
    }

    #[test]
    fn completion_reproduces_the_protocol() {
        let sc = hardy_protocol();
        let done = complete_hardy(sc.psi(), &sc.alice()[0], &sc.alice()[1], 1e-10).unwrap();
        assert!(done.bob()[0].matrix().distance(sc.bob()[0].matrix()) < 1e-12);
        assert!(done.bob()[1].matrix().distance(sc.bob()[1].matrix()) < 1e-12);
    }

    #[test]
    fn completion_meets_the_constraints() {
        // a2 chosen so that (1 + a2)psi is orthogonal to (1 + a1)psi
        let mut rng = rng_from_seed(62);
        let mut checked = 0;
        for i in 0..300 {
            let d = 2 + i % 3;
            let psi = random_state(d, &mut rng);
            let a1 = random_observable(d, &mut rng);
            let v = psi.amplitudes();
            let w = linalg::add_vec(v, &a1.matrix().apply(v));
            let a2 = if linalg::norm(&w) < 1e-9 {
                random_observable(d, &mut rng)
            } else {
                // flip psi's component along w, leaving (1 + a2)psi ⟂ w
                let e = unit(&w).unwrap();
                let perp = linalg::sub_vec(v, &linalg::scale_vec(&e, linalg::inner(&e, v)));
                match unit(&perp) {
                    Some(p) => DichotomicObservable::new(
                        &ComplexMatrix::outer(&p, &p).scale_real(2.0) - &ComplexMatrix::identity(d),
                    )
                    .unwrap(),
                    None => continue,
                }
            };
            if hardy_orthogonality_check(&psi, &a1, &a2) < 1e-10 {
                let sc = complete_hardy(&psi, &a1, &a2, 1e-10).unwrap();
                assert!(
                    hardy_check(&sc, 1e-8).unwrap().constraints_satisfied,
                    "instance {i}"
                );
                checked += 1;
            }
        }
        assert!(checked > 200);
    }

    #[test]
    fn temporal_search_reaches_one_quarter() {
        for d in [2, 3] {
            let opt = hardy_max_temporal(d, 4, 5);
            assert!(opt.report.max_residual() < 1e-6);
            assert!(opt.value <= 0.25 + 1e-6);
            assert!((opt.value - 0.25).abs() < 1e-4, "d={d}: {}", opt.value);
            assert!(opt.report.hv_infeasible);
        }
    }

    #[test]
    fn spatial_search_reaches_the_two_qubit_optimum() {
        let opt = hardy_max_spatial(8, 5);
        assert!(opt.report.max_residual() < 1e-6);
        assert!(
            (opt.value - spatial_hardy_optimum()).abs() < 1e-4,
            "{}",
            opt.value
        );
        assert!(opt.value < 0.25);
    }
}
