//! Classical and quantum realizability of correlations.
//!
//! Hidden-variable models are mixtures of the `2^{m+n}` deterministic
//! assignments of outcomes to all settings; membership is a linear program.
//! Quantum realizability of correlators is the vector condition checked in
//! [`gram`]; temporal and spatial correlator sets coincide.

pub mod gram;
pub mod realize;
pub mod simplex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigensystem, ComplexMatrix, C64};
use crate::operator::{
    reflection_between, DichotomicObservable, Outcome, PureState, INVARIANT_TOL,
};
use crate::random::{random_nontrivial_observable, random_state, rng_from_seed, sub_seed};
use crate::scenario::{
    correlators, CorrelatorMatrix, JointProbabilities, ProbabilityTable, TemporalScenario,
};

pub use realize::{realize_correlators, realize_spatial};

/// Largest `m + n` accepted by the hidden-variable programs.
pub const MAX_SETTINGS: usize = 16;
/// Reconstruction tolerance for hidden-variable weights.
pub const HV_TOL: f64 = 1e-8;

/// Outcome assignment to every setting of both parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicState {
    pub alice: Vec<i8>,
    pub bob: Vec<i8>,
}

impl DeterministicState {
    /// The `index`-th state in lexicographic order over sign patterns with
    /// `-1 < +1`, Alice's signs most significant.
    pub fn from_index(m: usize, n: usize, index: usize) -> Self {
        let total = m + n;
        let sign = |pos: usize| {
            if (index >> (total - 1 - pos)) & 1 == 1 {
                1
            } else {
                -1
            }
        };
        Self {
            alice: (0..m).map(sign).collect(),
            bob: (m..total).map(sign).collect(),
        }
    }

    pub fn table(&self) -> ProbabilityTable {
        let blocks: Vec<Vec<JointProbabilities>> = self
            .alice
            .iter()
            .map(|&a| {
                self.bob
                    .iter()
                    .map(|&b| {
                        let mut p = [[0.0; 2]; 2];
                        p[Outcome::from_sign(a).unwrap().index()]
                            [Outcome::from_sign(b).unwrap().index()] = 1.0;
                        JointProbabilities { p }
                    })
                    .collect()
            })
            .collect();
        ProbabilityTable::from_blocks(&blocks).expect("deterministic blocks are normalized")
    }

    pub fn correlators(&self) -> CorrelatorMatrix {
        let rows: Vec<Vec<f64>> = self
            .alice
            .iter()
            .map(|&a| self.bob.iter().map(|&b| f64::from(a * b)).collect())
            .collect();
        CorrelatorMatrix::from_rows(&rows).expect("signs")
    }
}

/// All deterministic states in enumeration order.
pub fn deterministic_states(m: usize, n: usize) -> Result<Vec<DeterministicState>> {
    if m + n > MAX_SETTINGS {
        return Err(Error::BudgetExceeded {
            settings: m + n,
            max: MAX_SETTINGS,
        });
    }
    Ok((0..1usize << (m + n))
        .map(|i| DeterministicState::from_index(m, n, i))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Mixture over deterministic states; only nonzero weights are listed.
    Weights {
        states: Vec<DeterministicState>,
        weights: Vec<f64>,
    },
    /// Gram matrix of the vectors, Alice's first.
    Gram {
        matrix: Vec<Vec<f64>>,
        alice_vectors: Vec<Vec<f64>>,
        bob_vectors: Vec<Vec<f64>>,
    },
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Reconstruction error of the certificate when feasible; otherwise a
    /// positive measure of infeasibility (LP phase-1 optimum, or the final
    /// gap between the alternating-projection iterates).
    pub residual: f64,
    pub marginal: bool,
    pub certificate: Certificate,
}

/// `C11 + C12 + C21 - C22`.
pub fn chsh_value(c: &CorrelatorMatrix) -> Result<f64> {
    if (c.m(), c.n()) != (2, 2) {
        return Err(Error::Shape(format!(
            "CHSH needs a 2x2 matrix, found {}x{}",
            c.m(),
            c.n()
        )));
    }
    Ok(c.get(0, 0) + c.get(0, 1) + c.get(1, 0) - c.get(1, 1))
}

/// All eight inequalities `|±C11 ± C12 ± C21 ± C22| <= 2` with an odd number
/// of minus signs.
pub fn chsh_inequalities_hold(c: &CorrelatorMatrix, tol: f64) -> Result<bool> {
    chsh_value(c)?;
    let e = [c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1)];
    Ok((0..4).all(|odd| {
        let s: f64 = (0..4).map(|i| if i == odd { -e[i] } else { e[i] }).sum();
        s.abs() <= 2.0 + tol
    }))
}

fn lp_verdict(
    states: Vec<DeterministicState>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
) -> FeasibilityVerdict {
    let out = simplex::phase_one(&a, &b);
    let residual = if out.feasible {
        a.iter()
            .zip(&b)
            .map(|(row, bi)| (row.iter().zip(&out.x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max)
    } else {
        out.infeasibility
    };
    let feasible = out.feasible && residual <= HV_TOL;
    let certificate = if feasible {
        let (states, weights): (Vec<_>, Vec<_>) = states
            .into_iter()
            .zip(out.x)
            .filter(|(_, w)| *w > 1e-15)
            .unzip();
        Certificate::Weights { states, weights }
    } else {
        Certificate::None
    };
    FeasibilityVerdict {
        feasible,
        residual,
        marginal: false,
        certificate,
    }
}

/// Is the table a mixture of deterministic tables?
pub fn hv_table_feasible(table: &ProbabilityTable) -> Result<FeasibilityVerdict> {
    let (m, n) = (table.m(), table.n());
    let states = deterministic_states(m, n)?;
    let mut a = Vec::with_capacity(4 * m * n + 1);
    let mut b = Vec::with_capacity(4 * m * n + 1);
    for r in Outcome::BOTH {
        for s in Outcome::BOTH {
            for k in 0..m {
                for l in 0..n {
                    a.push(
                        states
                            .iter()
                            .map(|st| {
                                f64::from(u8::from(
                                    st.alice[k] as f64 == r.sign() && st.bob[l] as f64 == s.sign(),
                                ))
                            })
                            .collect(),
                    );
                    b.push(table.get(r, s, k, l));
                }
            }
        }
    }
    a.push(vec![1.0; states.len()]);
    b.push(1.0);
    Ok(lp_verdict(states, a, b))
}

/// Is the correlator matrix a mixture of deterministic sign products?
pub fn hv_correlator_feasible(c: &CorrelatorMatrix) -> Result<FeasibilityVerdict> {
    let (m, n) = (c.m(), c.n());
    let states = deterministic_states(m, n)?;
    let mut a = Vec::with_capacity(m * n + 1);
    let mut b = Vec::with_capacity(m * n + 1);
    for k in 0..m {
        for l in 0..n {
            a.push(
                states
                    .iter()
                    .map(|st| f64::from(st.alice[k] * st.bob[l]))
                    .collect(),
            );
            b.push(c.get(k, l));
        }
    }
    a.push(vec![1.0; states.len()]);
    b.push(1.0);
    Ok(lp_verdict(states, a, b))
}

/// Largest `m` or `n` accepted by [`tsirelson_feasible`].
pub const MAX_GRAM_SETTINGS: usize = 8;

/// Do unit-ball vectors with `<x_k, y_l> = C_kl` exist?
pub fn tsirelson_feasible(c: &CorrelatorMatrix) -> Result<FeasibilityVerdict> {
    if c.m() > MAX_GRAM_SETTINGS || c.n() > MAX_GRAM_SETTINGS {
        return Err(Error::Shape(format!(
            "at most {MAX_GRAM_SETTINGS} settings per party"
        )));
    }
    if c.entries().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sol = gram::solve(c);
    let marginal = sol.marginal();
    let certificate = if sol.feasible {
        Certificate::Gram {
            matrix: sol.gram,
            alice_vectors: sol.alice,
            bob_vectors: sol.bob,
        }
    } else {
        Certificate::None
    };
    Ok(FeasibilityVerdict {
        feasible: sol.feasible,
        residual: sol.residual,
        marginal,
        certificate,
    })
}

/// The correlators of any temporal scenario are quantum realizable in the
/// spatial sense; this runs the check.
pub fn temporal_equals_spatial_check(scenario: &TemporalScenario) -> Result<FeasibilityVerdict> {
    tsirelson_feasible(&correlators(scenario))
}

#[derive(Clone, Debug)]
pub struct ChshSearch {
    pub value: f64,
    pub scenario: TemporalScenario,
}

/// CHSH coefficients `c_kl` of `C11 + C12 + C21 - C22`.
const CHSH_SIGNS: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];
const SEESAW_ROUNDS: usize = 300;

/// Multi-start seesaw maximization of the temporal CHSH value on `C^dim`.
///
/// With `B_k = Σ_l c_kl b_l` the value is `Σ_k Re<a_k ψ|B_k ψ>`, so the best
/// `a_k` for fixed `ψ` and Bob is the reflection taking `ψ` to
/// `B_k ψ/|B_k ψ|`; Bob's update is symmetric, and the best `ψ` is the top
/// eigenvector of `Σ c_kl {a_k, b_l}/2`. Each step cannot decrease the value.
pub fn chsh_max_search(dim: usize, restarts: usize, seed: u64) -> ChshSearch {
    assert!(dim >= 2, "CHSH search needs dim >= 2");
    let runs: Vec<ChshSearch> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(sub_seed(seed, i as u64));
            let mut psi = random_state(dim, &mut rng);
            let mut alice: Vec<DichotomicObservable> = (0..2)
                .map(|_| random_nontrivial_observable(dim, &mut rng))
                .collect();
            let mut bob: Vec<DichotomicObservable> = (0..2)
                .map(|_| random_nontrivial_observable(dim, &mut rng))
                .collect();
            let mut last = f64::MIN;
            for _ in 0..SEESAW_ROUNDS {
                alice = best_response(&psi, &bob, false);
                bob = best_response(&psi, &alice, true);
                psi = top_state(&alice, &bob);
                let sc = TemporalScenario::new(psi.clone(), alice.clone(), bob.clone(), None)
                    .expect("same dimension");
                let v = chsh_value(&correlators(&sc)).expect("2x2");
                if v - last < 1e-13 {
                    last = v;
                    break;
                }
                last = v;
            }
            let scenario = TemporalScenario::new(psi, alice, bob, None).expect("same dimension");
            ChshSearch {
                value: last,
                scenario,
            }
        })
        .collect();
    runs.into_iter()
        .fold(None::<ChshSearch>, |best, r| match best {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .expect("at least one run")
}

/// Optimal settings for one party given the other's; `transpose` selects
/// the coefficient `c_lk` when the fixed party is Alice.
fn best_response(
    psi: &PureState,
    other: &[DichotomicObservable],
    transpose: bool,
) -> Vec<DichotomicObservable> {
    let v = psi.amplitudes();
    (0..2)
        .map(|k| {
            let mut phi = vec![C64::new(0.0, 0.0); v.len()];
            for (l, o) in other.iter().enumerate() {
                let c = if transpose {
                    CHSH_SIGNS[l][k]
                } else {
                    CHSH_SIGNS[k][l]
                };
                phi = linalg::add_vec(
                    &phi,
                    &linalg::scale_vec(&o.matrix().apply(v), C64::new(c, 0.0)),
                );
            }
            let n = linalg::norm(&phi);
            if n < 1e-12 {
                return DichotomicObservable::identity(v.len());
            }
            reflection_between(v, &linalg::scale_vec(&phi, C64::new(1.0 / n, 0.0)))
        })
        .collect()
}

fn top_state(alice: &[DichotomicObservable], bob: &[DichotomicObservable]) -> PureState {
    let d = alice[0].dim();
    let mut w = ComplexMatrix::zeros(d);
    for (k, a) in alice.iter().enumerate() {
        for (l, b) in bob.iter().enumerate() {
            w = &w
                + &a.matrix()
                    .anticommutator(b.matrix())
                    .scale_real(0.5 * CHSH_SIGNS[k][l]);
        }
    }
    let es = hermitian_eigensystem(&w.hermitize(), INVARIANT_TOL).expect("Hermitian");
    PureState::normalized(es.eigenvector(0)).expect("eigenvectors are unit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{tsirelson_settings, TSIRELSON};
    use crate::random::random_scenario;
    use rand::Rng;

    fn mat(rows: &[[f64; 2]; 2]) -> CorrelatorMatrix {
        CorrelatorMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn tsirelson() -> CorrelatorMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        mat(&[[h, h], [h, -h]])
    }

    #[test]
    fn chsh_value_examples() {
        let pr = mat(&[[-1.0, -1.0], [-1.0, 1.0]]);
        assert_eq!(chsh_value(&pr).unwrap(), -4.0);
        assert!((chsh_value(&tsirelson()).unwrap() - TSIRELSON).abs() < 1e-15);
        assert_eq!(chsh_value(&CorrelatorMatrix::zeros(2, 2)).unwrap(), 0.0);
        assert!(chsh_value(&CorrelatorMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn enumeration_order() {
        let states = deterministic_states(2, 2).unwrap();
        assert_eq!(states.len(), 16);
        assert_eq!(
            states[0],
            DeterministicState {
                alice: vec![-1, -1],
                bob: vec![-1, -1]
            }
        );
        assert_eq!(
            states[1],
            DeterministicState {
                alice: vec![-1, -1],
                bob: vec![-1, 1]
            }
        );
        assert_eq!(
            states[4],
            DeterministicState {
                alice: vec![-1, 1],
                bob: vec![-1, -1]
            }
        );
        assert!(matches!(
            deterministic_states(9, 8),
            Err(Error::BudgetExceeded {
                settings: 17,
                max: 16
            })
        ));
    }

    #[test]
    fn vertex_tables_are_feasible_with_unit_weight() {
        for st in deterministic_states(2, 3).unwrap() {
            let v = hv_table_feasible(&st.table()).unwrap();
            assert!(v.feasible);
            if let Certificate::Weights { states, weights } = &v.certificate {
                assert_eq!(states, &vec![st.clone()]);
                assert!((weights[0] - 1.0).abs() < 1e-12);
            } else {
                panic!("expected weights");
            }
        }
    }

    #[test]
    fn correlator_lp_examples() {
        assert!(
            hv_correlator_feasible(&mat(&[[1.0, 1.0], [1.0, 1.0]]))
                .unwrap()
                .feasible
        );
        assert!(
            hv_correlator_feasible(&CorrelatorMatrix::zeros(2, 2))
                .unwrap()
                .feasible
        );
        let v = hv_correlator_feasible(&tsirelson()).unwrap();
        assert!(!v.feasible && v.residual > 0.1);
    }

    #[test]
    fn correlator_lp_matches_chsh_inequalities() {
        let mut rng = rng_from_seed(41);
        for _ in 0..2000 {
            let e: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let c = mat(&[[e[0], e[1]], [e[2], e[3]]]);
            let lp = hv_correlator_feasible(&c).unwrap().feasible;
            let ineq = chsh_inequalities_hold(&c, 1e-8).unwrap();
            assert_eq!(lp, ineq, "{e:?}");
        }
    }

    #[test]
    fn tsirelson_table_is_not_classical() {
        let table = crate::scenario::full_table(&tsirelson_settings().scenario()).unwrap();
        assert!(!hv_table_feasible(&table).unwrap().feasible);
    }

    #[test]
    fn mixtures_of_vertices_are_feasible() {
        let mut rng = rng_from_seed(42);
        let states = deterministic_states(2, 2).unwrap();
        let w: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut acc = vec![vec![0.0; 2]; 2];
        for (st, wi) in states.iter().zip(&w) {
            let c = st.correlators();
            for k in 0..2 {
                for l in 0..2 {
                    acc[k][l] += wi / total * c.get(k, l);
                }
            }
        }
        let c = CorrelatorMatrix::from_rows(&acc).unwrap();
        assert!(hv_correlator_feasible(&c).unwrap().feasible);
        assert!(tsirelson_feasible(&c).unwrap().feasible);
    }

    #[test]
    fn quantum_verdicts() {
        assert!(
            !tsirelson_feasible(&mat(&[[-1.0, -1.0], [-1.0, 1.0]]))
                .unwrap()
                .feasible
        );
        let v = tsirelson_feasible(&tsirelson()).unwrap();
        assert!(v.feasible);
        assert!(matches!(v.certificate, Certificate::Gram { .. }));
        assert!(
            !tsirelson_feasible(&tsirelson().scaled(1.02))
                .unwrap()
                .feasible
        );
        assert!(
            tsirelson_feasible(&tsirelson().scaled(0.98))
                .unwrap()
                .feasible
        );
    }

    #[test]
    fn random_temporal_scenarios_are_quantum_feasible() {
        let mut rng = rng_from_seed(43);
        for i in 0..60 {
            let d = 2 + i % 5;
            let sc = random_scenario(d, 2 + i % 2, 2, i % 3 == 0, &mut rng);
            let v = temporal_equals_spatial_check(&sc).unwrap();
            assert!(v.feasible, "instance {i}: residual {}", v.residual);
        }
        assert!(
            temporal_equals_spatial_check(&crate::scenario::qutrit_witness())
                .unwrap()
                .feasible
        );
        assert!(
            temporal_equals_spatial_check(&tsirelson_settings().scenario())
                .unwrap()
                .feasible
        );
    }

    #[test]
    fn seesaw_reaches_but_never_exceeds_tsirelson() {
        for d in 2..=4 {
            let out = chsh_max_search(d, 10, 7);
            assert!(out.value <= TSIRELSON + 1e-6);
            assert!(out.value >= TSIRELSON - 1e-6, "d={d}: {}", out.value);
            let c = correlators(&out.scenario);
            assert!((chsh_value(&c).unwrap() - out.value).abs() < 1e-12);
        }
    }
}
