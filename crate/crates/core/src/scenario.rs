//! Joint probabilities, marginals and correlators for sequential (temporal)
//! and tensor-product (spatial) measurement scenarios.
//!
//! Setting indices are zero-based throughout: `k in 0..m` for Alice and
//! `l in 0..n` for Bob.

use crate::error::{Error, Result};
use crate::linalg::{self, apply_kron, ComplexMatrix, C64, ZERO};
use crate::operator::{projector, DichotomicObservable, Outcome, PureState, UnitaryMatrix};

/// Entries above this negative threshold are treated as rounding noise.
pub const NEGATIVE_CLAMP: f64 = -1e-12;

/// Tolerance on `sum_{r,s} P(r,s|k,l) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `P(r, s)` for one pair of settings, indexed by [`Outcome::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointProbabilities {
    pub p: [[f64; 2]; 2],
}

impl JointProbabilities {
    pub fn get(&self, r: Outcome, s: Outcome) -> f64 {
        self.p[r.index()][s.index()]
    }

    pub fn correlator(&self) -> f64 {
        let mut c = 0.0;
        for r in Outcome::BOTH {
            for s in Outcome::BOTH {
                c += r.sign() * s.sign() * self.get(r, s);
            }
        }
        c
    }

    pub fn alice_marginal(&self, r: Outcome) -> f64 {
        self.get(r, Outcome::Minus) + self.get(r, Outcome::Plus)
    }

    pub fn bob_marginal(&self, s: Outcome) -> f64 {
        self.get(Outcome::Minus, s) + self.get(Outcome::Plus, s)
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p
            .iter()
            .flatten()
            .zip(other.p.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Clamps rounding negatives and renormalizes.
    fn cleaned(mut self) -> Self {
        for v in self.p.iter_mut().flatten() {
            if *v < 0.0 && *v >= NEGATIVE_CLAMP {
                *v = 0.0;
            }
        }
        let total = self.total();
        if total > 0.0 {
            for v in self.p.iter_mut().flatten() {
                *v /= total;
            }
        }
        self
    }
}

/// Initial pure state, Alice's and Bob's observables, and an optional
/// unitary applied to the post-measurement state before Bob measures.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalScenario {
    psi: PureState,
    alice: Vec<DichotomicObservable>,
    bob: Vec<DichotomicObservable>,
    dynamics: Option<UnitaryMatrix>,
}

impl TemporalScenario {
    pub fn new(
        psi: PureState,
        alice: Vec<DichotomicObservable>,
        bob: Vec<DichotomicObservable>,
        dynamics: Option<UnitaryMatrix>,
    ) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::Shape(
                "both parties need at least one setting".into(),
            ));
        }
        let d = psi.dim();
        for op in alice.iter().chain(&bob) {
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
        }
        if let Some(u) = &dynamics {
            if u.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: u.dim(),
                });
            }
        }
        Ok(Self {
            psi,
            alice,
            bob,
            dynamics,
        })
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn alice(&self) -> &[DichotomicObservable] {
        &self.alice
    }

    pub fn bob(&self) -> &[DichotomicObservable] {
        &self.bob
    }

    pub fn dynamics(&self) -> Option<&UnitaryMatrix> {
        self.dynamics.as_ref()
    }

    pub fn m(&self) -> usize {
        self.alice.len()
    }

    pub fn n(&self) -> usize {
        self.bob.len()
    }

    /// Bob's observable in the Heisenberg picture, `U^dagger b U`.
    pub fn evolved_bob(&self, l: usize) -> Result<DichotomicObservable> {
        let b = self.bob.get(l).ok_or(Error::IndexOutOfRange {
            index: l,
            count: self.n(),
        })?;
        Ok(match &self.dynamics {
            Some(u) => b.heisenberg(u),
            None => b.clone(),
        })
    }

    fn alice_at(&self, k: usize) -> Result<&DichotomicObservable> {
        self.alice.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            count: self.m(),
        })
    }

    fn bob_at(&self, l: usize) -> Result<&DichotomicObservable> {
        self.bob.get(l).ok_or(Error::IndexOutOfRange {
            index: l,
            count: self.n(),
        })
    }

    /// Same scenario with the dynamics folded into Bob's observables.
    pub fn heisenberg_form(&self) -> Self {
        let bob = (0..self.n())
            .map(|l| self.evolved_bob(l).expect("index in range"))
            .collect();
        Self {
            psi: self.psi.clone(),
            alice: self.alice.clone(),
            bob,
            dynamics: None,
        }
    }

    pub fn with_psi(&self, psi: PureState) -> Result<Self> {
        Self::new(
            psi,
            self.alice.clone(),
            self.bob.clone(),
            self.dynamics.clone(),
        )
    }
}

/// `P(r,s) = 1/4 + r<a>/4 + s<b'>/8 + rs<{a,b'}>/8 + s<a b' a>/8` for
/// `a = a_k` and the evolved `b' = U^dagger b_l U`.
pub fn temporal_joint(
    scenario: &TemporalScenario,
    k: usize,
    l: usize,
) -> Result<JointProbabilities> {
    let a = scenario.alice_at(k)?;
    let b = scenario.evolved_bob(l)?;
    Ok(joint_from_expectations(
        scenario.psi.amplitudes(),
        a.matrix(),
        b.matrix(),
    ))
}

fn joint_from_expectations(
    psi: &[C64],
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> JointProbabilities {
    let a_psi = a.apply(psi);
    let b_psi = b.apply(psi);
    let exp_a = linalg::inner(psi, &a_psi).re;
    let exp_b = linalg::inner(psi, &b_psi).re;
    let anti = 2.0 * linalg::inner(&a_psi, &b_psi).re;
    let aba = linalg::inner(&a_psi, &b.apply(&a_psi)).re;
    let mut p = [[0.0; 2]; 2];
    for r in Outcome::BOTH {
        for s in Outcome::BOTH {
            let (rs, ss) = (r.sign(), s.sign());
            p[r.index()][s.index()] = 0.25
                + 0.25 * rs * exp_a
                + 0.125 * ss * exp_b
                + 0.125 * rs * ss * anti
                + 0.125 * ss * aba;
        }
    }
    JointProbabilities { p }.cleaned()
}

/// Alice-branch probabilities below this are treated as impossible.
const IMPOSSIBLE_BRANCH: f64 = 1e-300;

/// Born rule for Alice, explicit collapse and renormalization, evolution,
/// Born rule for Bob.
pub fn sequential_oracle(
    scenario: &TemporalScenario,
    k: usize,
    l: usize,
) -> Result<JointProbabilities> {
    let a = scenario.alice_at(k)?;
    let b = scenario.bob_at(l)?;
    let psi = scenario.psi.amplitudes();
    let mut p = [[0.0; 2]; 2];
    for r in Outcome::BOTH {
        let collapsed = projector(a, r).apply(psi);
        let p_alice = linalg::norm_sqr(&collapsed);
        if p_alice <= IMPOSSIBLE_BRANCH {
            continue;
        }
        let mut post = linalg::scale_vec(&collapsed, C64::new(1.0 / p_alice.sqrt(), 0.0));
        if let Some(u) = &scenario.dynamics {
            post = u.apply(&post);
        }
        for s in Outcome::BOTH {
            let p_bob = linalg::norm_sqr(&projector(b, s).apply(&post));
            p[r.index()][s.index()] = p_alice * p_bob;
        }
    }
    Ok(JointProbabilities { p })
}

/// `P(r,s) = <psi| (1+ra)/2 ⊗ (1+sb)/2 |psi>` on `C^{d_a} ⊗ C^{d_b}`.
pub fn spatial_joint(
    psi: &PureState,
    a: &DichotomicObservable,
    b: &DichotomicObservable,
) -> Result<JointProbabilities> {
    let expected = a.dim() * b.dim();
    if psi.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: psi.dim(),
        });
    }
    let mut p = [[0.0; 2]; 2];
    for r in Outcome::BOTH {
        let pa = projector(a, r);
        for s in Outcome::BOTH {
            let pb = projector(b, s);
            let v = apply_kron(&pa, &pb, psi.amplitudes());
            p[r.index()][s.index()] = linalg::norm_sqr(&v);
        }
    }
    Ok(JointProbabilities { p }.cleaned())
}

/// `P(r,s|k,l)` for all outcomes and settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl ProbabilityTable {
    fn offset(&self, r: Outcome, s: Outcome, k: usize, l: usize) -> usize {
        ((r.index() * 2 + s.index()) * self.m + k) * self.n + l
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            values: vec![0.0; 4 * m * n],
        }
    }

    /// Builds a table from per-setting blocks `blocks[k][l]` and validates it.
    pub fn from_blocks(blocks: &[Vec<JointProbabilities>]) -> Result<Self> {
        let m = blocks.len();
        let n = blocks.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(
                "table blocks must form a nonempty m x n grid".into(),
            ));
        }
        let mut t = Self::zeros(m, n);
        for (k, row) in blocks.iter().enumerate() {
            for (l, jp) in row.iter().enumerate() {
                t.set_block(k, l, jp);
            }
        }
        t.validate()?;
        Ok(t)
    }

    /// Builds a table from nested `values[r][s][k][l]` with `r, s` indexed by
    /// `0 ↔ -1, 1 ↔ +1`.
    pub fn from_nested(m: usize, n: usize, values: &[Vec<Vec<Vec<f64>>>]) -> Result<Self> {
        let shape_err = || Error::Shape(format!("values must have shape [2][2][{m}][{n}]"));
        if m == 0 || n == 0 || values.len() != 2 {
            return Err(shape_err());
        }
        let mut t = Self::zeros(m, n);
        for r in Outcome::BOTH {
            let vr = &values[r.index()];
            if vr.len() != 2 {
                return Err(shape_err());
            }
            for s in Outcome::BOTH {
                let vs = &vr[s.index()];
                if vs.len() != m || vs.iter().any(|row| row.len() != n) {
                    return Err(shape_err());
                }
                for k in 0..m {
                    for l in 0..n {
                        let off = t.offset(r, s, k, l);
                        t.values[off] = vs[k][l];
                    }
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        Outcome::BOTH
            .iter()
            .map(|&r| {
                Outcome::BOTH
                    .iter()
                    .map(|&s| {
                        (0..self.m)
                            .map(|k| (0..self.n).map(|l| self.get(r, s, k, l)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn validate(&mut self) -> Result<()> {
        for v in &mut self.values {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if *v < NEGATIVE_CLAMP {
                return Err(Error::Table(format!("negative probability {v}")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
            if *v > 1.0 + NORMALIZATION_TOL {
                return Err(Error::Table(format!("probability {v} exceeds 1")));
            }
        }
        for k in 0..self.m {
            for l in 0..self.n {
                let total = self.block(k, l).total();
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::Table(format!(
                        "block (k={k}, l={l}) sums to {total}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    fn set_block(&mut self, k: usize, l: usize, jp: &JointProbabilities) {
        for r in Outcome::BOTH {
            for s in Outcome::BOTH {
                let off = self.offset(r, s, k, l);
                self.values[off] = jp.get(r, s);
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: Outcome, s: Outcome, k: usize, l: usize) -> f64 {
        self.values[self.offset(r, s, k, l)]
    }

    pub fn block(&self, k: usize, l: usize) -> JointProbabilities {
        let mut p = [[0.0; 2]; 2];
        for r in Outcome::BOTH {
            for s in Outcome::BOTH {
                p[r.index()][s.index()] = self.get(r, s, k, l);
            }
        }
        JointProbabilities { p }
    }

    /// `sum_s P(r,s|k,l)`.
    pub fn alice_marginal(&self, r: Outcome, k: usize, l: usize) -> f64 {
        self.block(k, l).alice_marginal(r)
    }

    /// `sum_r P(r,s|k,l)`.
    pub fn bob_marginal(&self, s: Outcome, k: usize, l: usize) -> f64 {
        self.block(k, l).bob_marginal(s)
    }

    /// Largest spread over `l` of Alice's marginal, per `(r, k)`.
    pub fn backward_signaling_residuals(&self) -> Vec<(Outcome, usize, f64)> {
        let mut out = Vec::new();
        for k in 0..self.m {
            for r in Outcome::BOTH {
                let vals: Vec<f64> = (0..self.n).map(|l| self.alice_marginal(r, k, l)).collect();
                let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                let min = vals.iter().cloned().fold(f64::MAX, f64::min);
                out.push((r, k, max - min));
            }
        }
        out
    }

    pub fn backward_signaling(&self) -> f64 {
        self.backward_signaling_residuals()
            .iter()
            .map(|x| x.2)
            .fold(0.0, f64::max)
    }

    /// Largest spread over `k` of Bob's marginal.
    pub fn forward_signaling(&self) -> f64 {
        let mut worst = 0.0f64;
        for l in 0..self.n {
            for s in Outcome::BOTH {
                let vals: Vec<f64> = (0..self.m).map(|k| self.bob_marginal(s, k, l)).collect();
                let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                let min = vals.iter().cloned().fold(f64::MAX, f64::min);
                worst = worst.max(max - min);
            }
        }
        worst
    }

    /// `C_kl = sum rs P(r,s|k,l)`.
    pub fn correlators(&self) -> CorrelatorMatrix {
        let mut c = CorrelatorMatrix::zeros(self.m, self.n);
        for k in 0..self.m {
            for l in 0..self.n {
                c.set(k, l, self.block(k, l).correlator());
            }
        }
        c
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.m, self.n), (other.m, other.n));
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Real `m x n` matrix of correlators.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorMatrix {
    m: usize,
    n: usize,
    entries: Vec<f64>,
}

impl CorrelatorMatrix {
    pub const BOUND_TOL: f64 = 1e-9;

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            entries: vec![0.0; m * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(
                "correlator matrix must be a nonempty rectangle".into(),
            ));
        }
        let entries: Vec<f64> = rows.iter().flatten().copied().collect();
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(bad) = entries.iter().find(|x| x.abs() > 1.0 + Self::BOUND_TOL) {
            return Err(Error::Shape(format!("correlator {bad} outside [-1, 1]")));
        }
        Ok(Self { m, n, entries })
    }

    /// Same as [`CorrelatorMatrix::from_rows`] but without the `|C| <= 1`
    /// check, for probing infeasible inputs such as scaled Tsirelson points.
    pub fn from_rows_unchecked(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(
                "correlator matrix must be a nonempty rectangle".into(),
            ));
        }
        Ok(Self {
            m,
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.n + l]
    }

    pub fn set(&mut self, k: usize, l: usize, v: f64) {
        self.entries[k * self.n + l] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|x| x * t).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.m);
        for k in 0..self.m {
            for l in 0..self.n {
                t.set(l, k, self.get(k, l));
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `P(r,s|k,l)` for every pair of settings.
pub fn full_table(scenario: &TemporalScenario) -> Result<ProbabilityTable> {
    let blocks: Vec<Vec<JointProbabilities>> = (0..scenario.m())
        .map(|k| {
            (0..scenario.n())
                .map(|l| temporal_joint(scenario, k, l))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    ProbabilityTable::from_blocks(&blocks)
}

/// Temporal correlator `<psi|{a,b}|psi>/2`.
pub fn correlator(
    psi: &PureState,
    a: &DichotomicObservable,
    b: &DichotomicObservable,
) -> Result<f64> {
    for op in [a, b] {
        if op.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim(),
                found: op.dim(),
            });
        }
    }
    let v = psi.amplitudes();
    Ok(linalg::inner(&a.matrix().apply(v), &b.matrix().apply(v)).re)
}

/// Matrix of temporal correlators with dynamics folded into Bob's side.
pub fn correlators(scenario: &TemporalScenario) -> CorrelatorMatrix {
    let mut c = CorrelatorMatrix::zeros(scenario.m(), scenario.n());
    let psi = scenario.psi.amplitudes();
    let a_psi: Vec<Vec<C64>> = scenario
        .alice
        .iter()
        .map(|a| a.matrix().apply(psi))
        .collect();
    for l in 0..scenario.n() {
        let b = scenario.evolved_bob(l).expect("index in range");
        let b_psi = b.matrix().apply(psi);
        for (k, ap) in a_psi.iter().enumerate() {
            c.set(k, l, linalg::inner(ap, &b_psi).re);
        }
    }
    c
}

/// Qutrit example: Alice's outcomes are uniform for both settings, but after
/// `a_1` Bob's `b_1` yields `-1` with certainty while after `a_2` it is
/// uniform. `b_2` is `σz`-like on `|0>, |1>`.
pub fn qutrit_witness() -> TemporalScenario {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let one = C64::new(1.0, 0.0);
    let v01 = [C64::new(h, 0.0), C64::new(h, 0.0), ZERO];
    let v02 = [C64::new(h, 0.0), ZERO, C64::new(h, 0.0)];
    let v2 = [ZERO, ZERO, one];
    let a1 = DichotomicObservable::from_ray(&v01).expect("nonzero ray");
    let a2 = DichotomicObservable::from_ray(&v02).expect("nonzero ray");
    let b1 = DichotomicObservable::from_ray(&v2).expect("nonzero ray");
    let b2 = DichotomicObservable::new(ComplexMatrix::real_diagonal(&[1.0, -1.0, 1.0]))
        .expect("diagonal signs");
    TemporalScenario::new(PureState::basis(3, 0), vec![a1, a2], vec![b1, b2], None)
        .expect("qutrit fixture is consistent")
}

/// Two-party scenario on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialScenario {
    psi: PureState,
    dim_a: usize,
    dim_b: usize,
    alice: Vec<DichotomicObservable>,
    bob: Vec<DichotomicObservable>,
}

impl SpatialScenario {
    pub fn new(
        psi: PureState,
        alice: Vec<DichotomicObservable>,
        bob: Vec<DichotomicObservable>,
    ) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::Shape(
                "both parties need at least one setting".into(),
            ));
        }
        let dim_a = alice[0].dim();
        let dim_b = bob[0].dim();
        for a in &alice {
            if a.dim() != dim_a {
                return Err(Error::DimensionMismatch {
                    expected: dim_a,
                    found: a.dim(),
                });
            }
        }
        for b in &bob {
            if b.dim() != dim_b {
                return Err(Error::DimensionMismatch {
                    expected: dim_b,
                    found: b.dim(),
                });
            }
        }
        if psi.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: psi.dim(),
            });
        }
        Ok(Self {
            psi,
            dim_a,
            dim_b,
            alice,
            bob,
        })
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn alice(&self) -> &[DichotomicObservable] {
        &self.alice
    }

    pub fn bob(&self) -> &[DichotomicObservable] {
        &self.bob
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn m(&self) -> usize {
        self.alice.len()
    }

    pub fn n(&self) -> usize {
        self.bob.len()
    }

    pub fn joint(&self, k: usize, l: usize) -> Result<JointProbabilities> {
        let a = self.alice.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            count: self.m(),
        })?;
        let b = self.bob.get(l).ok_or(Error::IndexOutOfRange {
            index: l,
            count: self.n(),
        })?;
        spatial_joint(&self.psi, a, b)
    }

    pub fn table(&self) -> Result<ProbabilityTable> {
        let blocks: Vec<Vec<JointProbabilities>> = (0..self.m())
            .map(|k| {
                (0..self.n())
                    .map(|l| self.joint(k, l))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        ProbabilityTable::from_blocks(&blocks)
    }

    /// `<psi| a_k ⊗ b_l |psi>`.
    pub fn correlators(&self) -> CorrelatorMatrix {
        let psi = self.psi.amplitudes();
        let mut c = CorrelatorMatrix::zeros(self.m(), self.n());
        for (k, a) in self.alice.iter().enumerate() {
            for (l, b) in self.bob.iter().enumerate() {
                let v = apply_kron(a.matrix(), b.matrix(), psi);
                c.set(k, l, linalg::inner(psi, &v).re);
            }
        }
        c
    }

    /// The same operators on the joint space, measured one after the other
    /// with Alice first: `a_k ⊗ 1` then `1 ⊗ b_l`.
    pub fn to_temporal(&self) -> TemporalScenario {
        let alice = self
            .alice
            .iter()
            .map(|a| a.tensor_identity_right(self.dim_b))
            .collect();
        let bob = self
            .bob
            .iter()
            .map(|b| b.tensor_identity_left(self.dim_a))
            .collect();
        TemporalScenario::new(self.psi.clone(), alice, bob, None)
            .expect("embedding keeps dimensions")
    }
}
