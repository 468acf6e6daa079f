//! Generalized measurements realizing any table without backward signaling.
//!
//! On the basis `|0>, |1+>, |1->, ..., |m+>, |m->` Alice's setting `k` with
//! outcome `r` sends `|0>` to `|k^r>` with probability `P_A(r|k)`, and Bob's
//! POVM reads off the stored pair `(k, r)` through its diagonal. Every Kraus
//! operator maps basis states to multiples of basis states, so the model is
//! a classical stochastic process written in quantum notation.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ONE};
use crate::operator::Outcome;
use crate::scenario::{JointProbabilities, ProbabilityTable};

/// Tolerance on backward signaling accepted by [`factorize`].
pub const SIGNALING_TOL: f64 = 1e-8;

/// `P(r,s|k,l) = P_A(r|k) P_B(s|r;k,l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedTable {
    /// `alice[k][r]`.
    pub alice: Vec<[f64; 2]>,
    /// `bob[k][l][r][s]`.
    pub bob: Vec<Vec<[[f64; 2]; 2]>>,
}

impl FactorizedTable {
    pub fn m(&self) -> usize {
        self.alice.len()
    }

    pub fn n(&self) -> usize {
        self.bob.first().map_or(0, Vec::len)
    }

    pub fn table(&self) -> Result<ProbabilityTable> {
        let blocks: Vec<Vec<JointProbabilities>> = (0..self.m())
            .map(|k| {
                (0..self.n())
                    .map(|l| {
                        let p = std::array::from_fn(|r| {
                            std::array::from_fn(|s| self.alice[k][r] * self.bob[k][l][r][s])
                        });
                        JointProbabilities { p }
                    })
                    .collect()
            })
            .collect();
        ProbabilityTable::from_blocks(&blocks)
    }
}

/// Splits a table into Alice's marginals and Bob's conditionals. Branches
/// Alice never produces get uniform conditionals.
pub fn factorize(table: &ProbabilityTable) -> Result<FactorizedTable> {
    if let Some(&(r, k, deviation)) = table
        .backward_signaling_residuals()
        .iter()
        .find(|(_, _, dev)| *dev > SIGNALING_TOL)
    {
        return Err(Error::BackwardSignaling {
            r: r.sign() as i8,
            k,
            deviation,
        });
    }
    let (m, n) = (table.m(), table.n());
    let alice: Vec<[f64; 2]> = (0..m)
        .map(|k| {
            Outcome::BOTH
                .map(|r| (0..n).map(|l| table.alice_marginal(r, k, l)).sum::<f64>() / n as f64)
        })
        .collect();
    let bob = (0..m)
        .map(|k| {
            (0..n)
                .map(|l| {
                    Outcome::BOTH.map(|r| {
                        let pa = table.alice_marginal(r, k, l);
                        if pa <= 0.0 {
                            [0.5, 0.5]
                        } else {
                            Outcome::BOTH.map(|s| (table.get(r, s, k, l) / pa).clamp(0.0, 1.0))
                        }
                    })
                })
                .collect()
        })
        .collect();
    Ok(FactorizedTable { alice, bob })
}

/// Basis index of `|k^r>`.
pub fn post_state_index(k: usize, r: Outcome) -> usize {
    1 + 2 * k + usize::from(r == Outcome::Minus)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    dim: usize,
    /// `kraus[k][r]`.
    kraus: Vec<[Vec<ComplexMatrix>; 2]>,
    /// `povm[l][s]`.
    povm: Vec<[ComplexMatrix; 2]>,
}

impl Instrument {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.kraus.len()
    }

    pub fn n(&self) -> usize {
        self.povm.len()
    }

    pub fn kraus(&self, k: usize, r: Outcome) -> &[ComplexMatrix] {
        &self.kraus[k][r.index()]
    }

    pub fn povm(&self, l: usize, s: Outcome) -> &ComplexMatrix {
        &self.povm[l][s.index()]
    }

    /// Largest entry of `Σ_{r,j} K†K - 1` over all settings.
    pub fn completeness_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim);
        self.kraus
            .iter()
            .map(|sets| {
                let mut sum = ComplexMatrix::zeros(self.dim);
                for k in sets.iter().flatten() {
                    sum = &sum + &(&k.adjoint() * k);
                }
                max_entry(&(&sum - &id))
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `Π+ + Π- = 1` or from positivity; the POVM
    /// elements are diagonal, so positivity is read off the diagonal.
    pub fn povm_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim);
        self.povm
            .iter()
            .map(|[minus, plus]| {
                let neg = [minus, plus]
                    .iter()
                    .flat_map(|e| diag(e))
                    .fold(0.0f64, |acc, v| acc.max(-v.re));
                let offdiag = [minus, plus]
                    .iter()
                    .map(|e| max_entry(&(&ComplexMatrix::diagonal(&diag(e)) - *e)))
                    .fold(0.0, f64::max);
                max_entry(&(&(minus + plus) - &id)).max(neg).max(offdiag)
            })
            .fold(0.0, f64::max)
    }
}

fn diag(m: &ComplexMatrix) -> Vec<C64> {
    (0..m.dim()).map(|i| m[(i, i)]).collect()
}

fn max_entry(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max)
}

fn ket_bra(dim: usize, i: usize, j: usize, w: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    m[(i, j)] = C64::new(w, 0.0);
    m
}

/// Kraus sets `{ sqrt(P_A(r|k)) |k^r><0| } ∪ { |k^r><j| / sqrt 2 : j != 0 }`
/// and POVMs `Π_l^s = diag(1/2, P_B(s|r;k,l), ...)`.
pub fn build_instrument(ft: &FactorizedTable) -> Instrument {
    let (m, n) = (ft.m(), ft.n());
    let dim = 2 * m + 1;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let kraus = (0..m)
        .map(|k| {
            Outcome::BOTH.map(|r| {
                let target = post_state_index(k, r);
                let mut set = vec![ket_bra(
                    dim,
                    target,
                    0,
                    ft.alice[k][r.index()].max(0.0).sqrt(),
                )];
                set.extend((1..dim).map(|j| ket_bra(dim, target, j, half)));
                set
            })
        })
        .collect();
    let povm = (0..n)
        .map(|l| {
            Outcome::BOTH.map(|s| {
                let mut d = vec![0.5; dim];
                for k in 0..m {
                    for r in Outcome::BOTH {
                        d[post_state_index(k, r)] = ft.bob[k][l][r.index()][s.index()];
                    }
                }
                ComplexMatrix::real_diagonal(&d)
            })
        })
        .collect();
    Instrument { dim, kraus, povm }
}

/// `P(r,s|k,l) = Σ_j <0| K_j† Π_l^s K_j |0>` for the Kraus set `(k, r)`.
pub fn simulate_instrument(inst: &Instrument, k: usize, l: usize) -> Result<JointProbabilities> {
    if k >= inst.m() {
        return Err(Error::IndexOutOfRange {
            index: k,
            count: inst.m(),
        });
    }
    if l >= inst.n() {
        return Err(Error::IndexOutOfRange {
            index: l,
            count: inst.n(),
        });
    }
    let mut zero = vec![C64::new(0.0, 0.0); inst.dim];
    zero[0] = ONE;
    let p = std::array::from_fn(|r| {
        std::array::from_fn(|s| {
            inst.kraus[k][r]
                .iter()
                .map(|kr| {
                    let v = kr.apply(&zero);
                    linalg::inner(&v, &inst.povm[l][s].apply(&v)).re
                })
                .sum()
        })
    });
    Ok(JointProbabilities { p })
}

/// Every joint distribution of the instrument started in `|0>`.
pub fn simulate_table(inst: &Instrument) -> Result<ProbabilityTable> {
    let blocks: Vec<Vec<JointProbabilities>> = (0..inst.m())
        .map(|k| {
            (0..inst.n())
                .map(|l| simulate_instrument(inst, k, l))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    ProbabilityTable::from_blocks(&blocks)
}

/// Factorizes, builds and resimulates `table`; returns the instrument and
/// the largest deviation of the simulated table from `table`.
pub fn round_trip(table: &ProbabilityTable) -> Result<(Instrument, f64)> {
    let inst = build_instrument(&factorize(table)?);
    let err = simulate_table(&inst)?.max_abs_diff(table);
    Ok((inst, err))
}

/// `P(r,s|k,l) = (1 + rs C_kl)/4` with `C11 = C12 = C21 = -1`, `C22 = +1`:
/// outcomes agree exactly when both parties use their second setting.
pub fn pr_box_table() -> ProbabilityTable {
    let c = [[-1.0, -1.0], [-1.0, 1.0]];
    let blocks: Vec<Vec<JointProbabilities>> = (0..2)
        .map(|k| {
            (0..2)
                .map(|l| JointProbabilities {
                    p: std::array::from_fn(|r| {
                        std::array::from_fn(|s| {
                            0.25 * (1.0
                                + Outcome::BOTH[r].sign() * Outcome::BOTH[s].sign() * c[k][l])
                        })
                    }),
                })
                .collect()
        })
        .collect();
    ProbabilityTable::from_blocks(&blocks).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{hv_table_feasible, DeterministicState};
    use crate::random::rng_from_seed;
    use rand::Rng;

    /// Random `P_A(r|k) P_B(s|r;k,l)`, occasionally with a zero branch.
    fn random_factorized<R: Rng>(m: usize, n: usize, rng: &mut R) -> FactorizedTable {
        let alice = (0..m)
            .map(|_| {
                let p = if rng.random_bool(0.1) {
                    0.0
                } else {
                    rng.random_range(0.0..1.0)
                };
                [1.0 - p, p]
            })
            .collect();
        let bob = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        std::array::from_fn(|_| {
                            let q = rng.random_range(0.0..1.0);
                            [1.0 - q, q]
                        })
                    })
                    .collect()
            })
            .collect();
        FactorizedTable { alice, bob }
    }

    #[test]
    fn product_table_is_recovered() {
        let pa = [0.3, 0.7];
        let pb = [0.8, 0.2];
        let blocks: Vec<Vec<JointProbabilities>> = (0..2)
            .map(|_| {
                (0..2)
                    .map(|_| JointProbabilities {
                        p: std::array::from_fn(|r| std::array::from_fn(|s| pa[r] * pb[s])),
                    })
                    .collect()
            })
            .collect();
        let ft = factorize(&ProbabilityTable::from_blocks(&blocks).unwrap()).unwrap();
        for k in 0..2 {
            assert!((ft.alice[k][0] - 0.3).abs() < 1e-15 && (ft.alice[k][1] - 0.7).abs() < 1e-15);
            for l in 0..2 {
                for r in 0..2 {
                    assert!((ft.bob[k][l][r][0] - 0.8).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn signaling_protocol_factorizes() {
        use crate::scenario::full_table;
        let sc = crate::signaling::SignalingScenario::protocol().temporal();
        let ft = factorize(&full_table(&sc).unwrap()).unwrap();
        // |x+> is an eigenvector of a1 = sigma_x, while a2 = sigma_y is unbiased
        assert_eq!(ft.alice[0], [0.0, 1.0]);
        assert!((ft.alice[1][0] - 0.5).abs() < 1e-12 && (ft.alice[1][1] - 0.5).abs() < 1e-12);
        // Bob's sigma_x repeats Alice's +1; the unreachable -1 branch is uniform
        assert!((ft.bob[0][0][1][1] - 1.0).abs() < 1e-12);
        assert_eq!(ft.bob[0][0][0], [0.5, 0.5]);
        assert!((ft.bob[1][0][1][1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn backward_signaling_is_rejected() {
        let mut values = pr_box_table().to_nested();
        // move weight between Alice's outcomes for k = 0, l = 0 only
        values[0][0][0][0] += 0.25;
        values[1][0][0][0] -= 0.25;
        let t = ProbabilityTable::from_nested(2, 2, &values).unwrap();
        match factorize(&t) {
            Err(Error::BackwardSignaling { k, deviation, .. }) => {
                assert_eq!(k, 0);
                assert!(deviation > 0.1);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn alice_prepares_the_labelled_post_states() {
        let mut rng = rng_from_seed(71);
        let ft = random_factorized(2, 2, &mut rng);
        let inst = build_instrument(&ft);
        assert_eq!(inst.dim(), 5);
        let mut zero = vec![C64::new(0.0, 0.0); 5];
        zero[0] = ONE;
        for k in 0..2 {
            for r in Outcome::BOTH {
                let v = inst.kraus(k, r)[0].apply(&zero);
                assert!((linalg::norm_sqr(&v) - ft.alice[k][r.index()]).abs() < 1e-15);
                for (i, z) in v.iter().enumerate() {
                    if i != post_state_index(k, r) {
                        assert_eq!(z.norm(), 0.0);
                    }
                }
                for j in inst.kraus(k, r)[1..].iter() {
                    assert!(j.apply(&zero).iter().all(|z| z.norm() == 0.0));
                }
            }
        }
        // the POVM evaluated on |k^r> gives Bob's conditional
        for l in 0..2 {
            for s in Outcome::BOTH {
                for k in 0..2 {
                    for r in Outcome::BOTH {
                        let i = post_state_index(k, r);
                        assert_eq!(
                            inst.povm(l, s)[(i, i)].re,
                            ft.bob[k][l][r.index()][s.index()]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kraus_images_are_classical() {
        let mut rng = rng_from_seed(72);
        let inst = build_instrument(&random_factorized(3, 2, &mut rng));
        for k in 0..3 {
            for r in Outcome::BOTH {
                for kr in inst.kraus(k, r) {
                    for j in 0..inst.dim() {
                        let img =
                            kr.apply(crate::operator::PureState::basis(inst.dim(), j).amplitudes());
                        assert!(img.iter().filter(|z| z.norm() > 0.0).count() <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn random_round_trips() {
        let mut rng = rng_from_seed(73);
        for i in 0..300 {
            let (m, n) = (1 + i % 3, 1 + (i / 3) % 3);
            let table = random_factorized(m, n, &mut rng).table().unwrap();
            let (inst, err) = round_trip(&table).unwrap();
            assert!(err < 1e-10, "instance {i}: {err}");
            assert_eq!(inst.dim(), 2 * m + 1);
            assert!(inst.completeness_residual() < 1e-12);
            assert!(inst.povm_residual() < 1e-12);
        }
    }

    #[test]
    fn pr_box_round_trips() {
        let pr = pr_box_table();
        assert!(!hv_table_feasible(&pr).unwrap().feasible);
        assert!(pr.backward_signaling() < 1e-15 && pr.forward_signaling() < 1e-15);
        let (_, err) = round_trip(&pr).unwrap();
        assert!(err < 1e-15);
    }

    #[test]
    fn deterministic_table_round_trips() {
        let st = DeterministicState {
            alice: vec![1, -1],
            bob: vec![-1, 1],
        };
        let (inst, err) = round_trip(&st.table()).unwrap();
        assert!(err < 1e-15);
        assert!(inst.completeness_residual() < 1e-15);
    }

    #[test]
    fn index_errors() {
        let inst = build_instrument(&factorize(&pr_box_table()).unwrap());
        assert!(simulate_instrument(&inst, 2, 0).is_err());
        assert!(simulate_instrument(&inst, 0, 2).is_err());
    }
}
