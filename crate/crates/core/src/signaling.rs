//! Forward signaling from Alice to Bob: the signaling levels `S±`, the
//! classical channel induced on Bob's outcome, its capacity, and the region
//! of achievable `(E(s|1), E(s|2))` pairs.
//!
//! `E(s|k) = P(+1|k) - P(-1|k) = ½<b> + ½<a_k b a_k>`, so
//! `E(s|1) - E(s|2) = 2 S_+` and `|S_+| <= ½` confines the pairs to the
//! hexagon `|E1 - E2| <= 1` inside the square.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::operator::{
    pauli_observable, x_plus, DichotomicObservable, Outcome, PureState, UnitaryMatrix,
};
use crate::optim::{minimize_bfgs, BfgsOptions};
use crate::param::{gaussian_reals, Layout};
use crate::random::{random_observable, random_state, rng_from_seed, sub_seed};
use crate::scenario::{temporal_joint, ProbabilityTable, TemporalScenario};

/// Initial state, Alice's two settings and a single observable for Bob.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalingScenario {
    psi: PureState,
    a1: DichotomicObservable,
    a2: DichotomicObservable,
    b: DichotomicObservable,
}

impl SignalingScenario {
    pub fn new(
        psi: PureState,
        a1: DichotomicObservable,
        a2: DichotomicObservable,
        b: DichotomicObservable,
    ) -> Result<Self> {
        let d = psi.dim();
        for op in [&a1, &a2, &b] {
            if op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: op.dim(),
                });
            }
        }
        Ok(Self { psi, a1, a2, b })
    }

    /// `|x+>`, `a1 = σx`, `a2 = σy`, `b = σx`: `S_+ = ½`.
    pub fn protocol() -> Self {
        Self::new(
            x_plus(),
            pauli_observable('x'),
            pauli_observable('y'),
            pauli_observable('x'),
        )
        .expect("qubit")
    }

    /// Bob's outcome relabelled, `b -> -b`.
    pub fn flipped(&self) -> Self {
        Self {
            b: self.b.negated(),
            ..self.clone()
        }
    }

    /// Alice's settings exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a1: self.a2.clone(),
            a2: self.a1.clone(),
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn alice(&self) -> [&DichotomicObservable; 2] {
        [&self.a1, &self.a2]
    }

    pub fn bob(&self) -> &DichotomicObservable {
        &self.b
    }

    pub fn temporal(&self) -> TemporalScenario {
        TemporalScenario::new(
            self.psi.clone(),
            vec![self.a1.clone(), self.a2.clone()],
            vec![self.b.clone()],
            None,
        )
        .expect("dimensions checked on construction")
    }

    /// The same scenario on `C^dim`, acting as the identity on the added
    /// basis states.
    pub fn embed(&self, dim: usize) -> Self {
        let mut amps = self.psi.amplitudes().to_vec();
        amps.resize(dim, C64::new(0.0, 0.0));
        Self {
            psi: PureState::new_unchecked(amps),
            a1: self.a1.embed(dim),
            a2: self.a2.embed(dim),
            b: self.b.embed(dim),
        }
    }
}

/// `<a b a>` in `psi`.
fn sandwich(psi: &[C64], a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let ap = a.apply(psi);
    linalg::inner(&ap, &b.apply(&ap)).re
}

/// `S_+ = ¼ (<a1 b a1> - <a2 b a2>)`.
pub fn s_plus(sc: &SignalingScenario) -> f64 {
    let psi = sc.psi.amplitudes();
    0.25 * (sandwich(psi, sc.a1.matrix(), sc.b.matrix())
        - sandwich(psi, sc.a2.matrix(), sc.b.matrix()))
}

/// `S_-` from its definition in terms of joint probabilities.
pub fn s_minus(sc: &SignalingScenario) -> f64 {
    let t = sc.temporal();
    let bob_minus = |k| {
        temporal_joint(&t, k, 0)
            .expect("indices in range")
            .bob_marginal(Outcome::Minus)
    };
    bob_minus(0) - bob_minus(1)
}

/// `S_s = P(s|1) - P(s|2)` for Bob's setting `l` of a table with two
/// Alice settings.
pub fn signaling_from_table(table: &ProbabilityTable, s: Outcome, l: usize) -> Result<f64> {
    if table.m() != 2 {
        return Err(Error::Shape(format!(
            "signaling needs two Alice settings, found {}",
            table.m()
        )));
    }
    if l >= table.n() {
        return Err(Error::IndexOutOfRange {
            index: l,
            count: table.n(),
        });
    }
    Ok(table.bob_marginal(s, 0, l) - table.bob_marginal(s, 1, l))
}

/// `P(s|k)` for two inputs `k` and two outputs `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InducedChannel {
    plus: [f64; 2],
}

impl InducedChannel {
    /// From `P(+1|1)` and `P(+1|2)`.
    pub fn new(p_plus_1: f64, p_plus_2: f64) -> Result<Self> {
        for p in [p_plus_1, p_plus_2] {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                return Err(Error::Table(format!(
                    "channel probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            plus: [p_plus_1.clamp(0.0, 1.0), p_plus_2.clamp(0.0, 1.0)],
        })
    }

    /// From `E(s|1), E(s|2)` in `[-1, 1]`.
    pub fn from_expectations(e1: f64, e2: f64) -> Result<Self> {
        Self::new(0.5 * (1.0 + e1), 0.5 * (1.0 + e2))
    }

    /// Zero-based input `k`.
    pub fn prob(&self, s: Outcome, k: usize) -> f64 {
        match s {
            Outcome::Plus => self.plus[k],
            Outcome::Minus => 1.0 - self.plus[k],
        }
    }

    pub fn expectation(&self, k: usize) -> f64 {
        2.0 * self.plus[k] - 1.0
    }

    pub fn expectations(&self) -> [f64; 2] {
        [self.expectation(0), self.expectation(1)]
    }

    /// Rows `[P(-1|k), P(+1|k)]`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..2)
            .map(|k| vec![1.0 - self.plus[k], self.plus[k]])
            .collect()
    }
}

/// `P(s|k) = ½ + ¼ s <b> + ¼ s <a_k b a_k>`.
pub fn induced_channel(sc: &SignalingScenario) -> InducedChannel {
    let psi = sc.psi.amplitudes();
    let b = sc.b.matrix();
    let eb = linalg::inner(psi, &b.apply(psi)).re;
    let p = |a: &DichotomicObservable| {
        (0.5 + 0.25 * eb + 0.25 * sandwich(psi, a.matrix(), b)).clamp(0.0, 1.0)
    };
    InducedChannel {
        plus: [p(&sc.a1), p(&sc.a2)],
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Capacity {
    pub capacity_bits: f64,
    pub input_distribution: Vec<f64>,
    #[serde(skip)]
    pub iterations: usize,
}

pub const BA_TOL: f64 = 1e-10;
pub const BA_MAX_ITER: usize = 10_000;

/// Capacity by Blahut–Arimoto.
pub fn channel_capacity(ch: &InducedChannel) -> Capacity {
    blahut_arimoto(&ch.rows(), BA_TOL, BA_MAX_ITER)
}

/// Blahut–Arimoto for a channel `w[x][y]`. Stops when the gap between the
/// upper bound `max_x D(w_x || q)` and the lower bound falls below `tol`
/// (in bits).
pub fn blahut_arimoto(w: &[Vec<f64>], tol: f64, max_iter: usize) -> Capacity {
    let nx = w.len();
    let ny = w.first().map_or(0, Vec::len);
    let mut p = vec![1.0 / nx as f64; nx];
    let mut lower = 0.0;
    let mut iterations = 0;
    let ln2 = std::f64::consts::LN_2;
    while iterations < max_iter {
        iterations += 1;
        let q: Vec<f64> = (0..ny)
            .map(|y| (0..nx).map(|x| p[x] * w[x][y]).sum())
            .collect();
        let d: Vec<f64> = (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| w[x][y] > 0.0)
                    .map(|y| w[x][y] * (w[x][y] / q[y]).ln())
                    .sum::<f64>()
            })
            .collect();
        let z: f64 = (0..nx).map(|x| p[x] * d[x].exp()).sum();
        lower = z.ln() / ln2;
        let upper = d.iter().cloned().fold(f64::MIN, f64::max) / ln2;
        for x in 0..nx {
            p[x] *= d[x].exp() / z;
        }
        if upper - lower < tol {
            break;
        }
    }
    Capacity {
        capacity_bits: lower.max(0.0),
        input_distribution: p,
        iterations,
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Closed-form capacity of the binary channel `P(+|1) = a`, `P(+|2) = b`,
/// returning `(capacity, probability of input 1)`.
///
/// Stationarity of `h(y) - q h(a) - (1-q) h(b)` with `y = q a + (1-q) b`
/// gives `log2((1-y)/y) = (h(a) - h(b))/(a - b)`.
pub fn binary_channel_capacity(a: f64, b: f64) -> (f64, f64) {
    if (a - b).abs() < 1e-15 {
        return (0.0, 0.5);
    }
    let z = (binary_entropy(a) - binary_entropy(b)) / (a - b);
    let y = 1.0 / (1.0 + z.exp2());
    let q = ((y - b) / (a - b)).clamp(0.0, 1.0);
    let y = q * a + (1.0 - q) * b;
    let c = binary_entropy(y) - q * binary_entropy(a) - (1.0 - q) * binary_entropy(b);
    (c.max(0.0), q)
}

#[derive(Clone, Debug)]
pub struct SignalingOptimum {
    pub value: f64,
    pub scenario: SignalingScenario,
}

/// Multi-start maximization of `S_+` over states and observables on `C^dim`.
pub fn splus_max_search(dim: usize, restarts: usize, seed: u64) -> SignalingOptimum {
    assert!(dim >= 2, "signaling search needs dim >= 2");
    let runs: Vec<SignalingOptimum> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(sub_seed(seed, i as u64));
            let ranks: Vec<usize> = (0..3).map(|_| rng.random_range(1..dim)).collect();
            let layout = Layout::new(dim, ranks);
            let x0 = gaussian_reals(layout.len(), &mut rng);
            let f = |p: &[f64]| {
                let psi = layout.state(p);
                let b = layout.observable(p, 2);
                -0.25
                    * (sandwich(&psi, &layout.observable(p, 0), &b)
                        - sandwich(&psi, &layout.observable(p, 1), &b))
            };
            let m = minimize_bfgs(
                f,
                x0,
                BfgsOptions {
                    max_iter: 300,
                    ..Default::default()
                },
            );
            let (psi, obs) = layout.decode(&m.x);
            let [a1, a2, b]: [DichotomicObservable; 3] = obs.try_into().expect("three observables");
            let scenario = SignalingScenario { psi, a1, a2, b };
            SignalingOptimum {
                value: s_plus(&scenario),
                scenario,
            }
        })
        .collect();
    best_of(runs)
}

fn best_of(runs: Vec<SignalingOptimum>) -> SignalingOptimum {
    let mut best: Option<SignalingOptimum> = None;
    for r in runs {
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.expect("at least one run")
}

/// The protocol and its variants under `s <-> -s` and `a1 <-> a2`, reaching
/// `(1,0)`, `(-1,0)`, `(0,1)` and `(0,-1)`.
pub fn vertex_protocols() -> [SignalingScenario; 4] {
    let p = SignalingScenario::protocol();
    [p.clone(), p.flipped(), p.swapped(), p.swapped().flipped()]
}

/// `(E(s|1), E(s|2))` pairs from seeded scenarios on `C^dim`. Three of every
/// four samples are uniformly random scenarios; the fourth is a small random
/// perturbation of one of the [`vertex_protocols`], with the perturbation
/// size log-uniform in `[1e-7, 1e-1]`.
pub fn region_sample(dim: usize, samples: usize, seed: u64) -> Vec<[f64; 2]> {
    assert!(dim >= 2, "region sampling needs dim >= 2");
    let vertices = vertex_protocols().map(|v| v.embed(dim));
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(sub_seed(seed, i as u64));
            let sc = if i % 4 == 3 {
                let eps = 10f64.powf(rng.random_range(-7.0..-1.0));
                perturb(&vertices[(i / 4) % 4], eps, &mut rng)
            } else {
                let psi = random_state(dim, &mut rng);
                let [a1, a2, b] = std::array::from_fn(|_| random_observable(dim, &mut rng));
                SignalingScenario { psi, a1, a2, b }
            };
            induced_channel(&sc).expectations()
        })
        .collect()
}

fn perturb<R: Rng + ?Sized>(sc: &SignalingScenario, eps: f64, rng: &mut R) -> SignalingScenario {
    let d = sc.dim();
    let mut conj = |a: &DichotomicObservable| {
        let u = small_unitary(d, eps, rng);
        a.heisenberg(&u)
    };
    let (a1, a2, b) = (conj(&sc.a1), conj(&sc.a2), conj(&sc.b));
    let noise = gaussian_reals(2 * d, rng);
    let amps: Vec<C64> = sc
        .psi
        .amplitudes()
        .iter()
        .zip(noise.chunks(2))
        .map(|(z, n)| z + C64::new(n[0], n[1]) * eps)
        .collect();
    let psi = PureState::normalized(amps).expect("perturbed state is nonzero");
    SignalingScenario { psi, a1, a2, b }
}

/// `exp(i eps H)` for a random Hermitian `H` of unit Frobenius norm.
fn small_unitary<R: Rng + ?Sized>(d: usize, eps: f64, rng: &mut R) -> UnitaryMatrix {
    let g = gaussian_reals(d * d, rng);
    let h = crate::operator::hermitian_from_parameters(d, &g).expect("d² parameters");
    let n = h.frobenius_norm().max(1e-300);
    UnitaryMatrix::exp_i(&h.scale_real(eps / n)).expect("Hermitian generator")
}

/// The quadrangle with vertices `(±1,0), (0,±1)`, counter-clockwise.
pub const QUADRANGLE: [[f64; 2]; 4] = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];

/// `|E1 - E2| <= 1` within the square, counter-clockwise.
pub const SIGNALING_HEXAGON: [[f64; 2]; 6] = [
    [1.0, 0.0],
    [1.0, 1.0],
    [0.0, 1.0],
    [-1.0, 0.0],
    [-1.0, -1.0],
    [0.0, -1.0],
];

/// Convex hull by Andrew's monotone chain, counter-clockwise, without
/// collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    0.5 * twice.abs()
}

/// Sutherland–Hodgman clipping of `subject` by the convex counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let side = |p: &[f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (sp, sq) = (side(&p), side(&q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// Fraction of `region`'s area covered by the convex hull of `points`.
pub fn hull_coverage(points: &[[f64; 2]], region: &[[f64; 2]]) -> f64 {
    let hull = convex_hull(points);
    polygon_area(&clip_convex(&hull, region)) / polygon_area(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_scenario;
    use crate::scenario::full_table;

    fn random_signaling(d: usize, rng: &mut crate::random::Rng64) -> SignalingScenario {
        let t = random_scenario(d, 2, 1, false, rng);
        SignalingScenario::new(
            t.psi().clone(),
            t.alice()[0].clone(),
            t.alice()[1].clone(),
            t.bob()[0].clone(),
        )
        .unwrap()
    }

    #[test]
    fn protocol_attains_one_half() {
        let p = SignalingScenario::protocol();
        assert!((s_plus(&p) - 0.5).abs() < 1e-15);
        assert!((s_minus(&p) + 0.5).abs() < 1e-15);
        let ch = induced_channel(&p);
        assert!((ch.prob(Outcome::Plus, 0) - 1.0).abs() < 1e-15);
        assert!((ch.prob(Outcome::Plus, 1) - 0.5).abs() < 1e-15);
        assert_eq!(
            ch.expectations().map(|e| (e * 1e12).round() / 1e12),
            [1.0, 0.0]
        );
    }

    #[test]
    fn identical_settings_cannot_signal() {
        let mut rng = rng_from_seed(1);
        let t = random_scenario(3, 1, 1, false, &mut rng);
        let a = t.alice()[0].clone();
        let sc = SignalingScenario::new(t.psi().clone(), a.clone(), a, t.bob()[0].clone()).unwrap();
        assert_eq!(s_plus(&sc), 0.0);
        let ch = induced_channel(&sc);
        assert_eq!(ch.prob(Outcome::Plus, 0), ch.prob(Outcome::Plus, 1));
        assert_eq!(channel_capacity(&ch).capacity_bits, 0.0);
    }

    #[test]
    fn closed_form_matches_table_definition() {
        let mut rng = rng_from_seed(2);
        for d in 2..6 {
            for _ in 0..50 {
                let sc = random_signaling(d, &mut rng);
                let table = full_table(&sc.temporal()).unwrap();
                let from_table = signaling_from_table(&table, Outcome::Plus, 0).unwrap();
                assert!((s_plus(&sc) - from_table).abs() < 1e-10);
                assert!((s_plus(&sc) + s_minus(&sc)).abs() < 1e-10);
                assert!(s_plus(&sc).abs() <= 0.5 + 1e-9);
                let ch = induced_channel(&sc);
                for k in 0..2 {
                    assert!(
                        (ch.prob(Outcome::Plus, k) - table.bob_marginal(Outcome::Plus, k, 0)).abs()
                            < 1e-10
                    );
                }
                let [e1, e2] = ch.expectations();
                assert!((e1 - e2 - 2.0 * s_plus(&sc)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sum_bound_fails_on_a_trivial_scenario() {
        let z = pauli_observable('z');
        let sc = SignalingScenario::new(PureState::basis(2, 0), z.clone(), z.clone(), z).unwrap();
        let [e1, e2] = induced_channel(&sc).expectations();
        assert_eq!((e1, e2), (1.0, 1.0));
        assert!((e1 - e2).abs() <= 1.0);
    }

    #[test]
    fn protocol_capacity() {
        let cap = channel_capacity(&induced_channel(&SignalingScenario::protocol()));
        assert!(
            (cap.capacity_bits - (1.25f64).log2()).abs() < 1e-6,
            "{cap:?}"
        );
        assert!((cap.input_distribution[0] - 0.6).abs() < 1e-4);
        assert!((cap.input_distribution[1] - 0.4).abs() < 1e-4);
        let (c, q) = binary_channel_capacity(1.0, 0.5);
        assert!((c - (1.25f64).log2()).abs() < 1e-12);
        assert!((q - 0.6).abs() < 1e-12);
    }

    #[test]
    fn capacity_extremes() {
        let perfect = InducedChannel::new(1.0, 0.0).unwrap();
        assert!((channel_capacity(&perfect).capacity_bits - 1.0).abs() < 1e-9);
        assert!(InducedChannel::new(1.2, 0.0).is_err());
        assert!(InducedChannel::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn blahut_arimoto_matches_closed_form() {
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let ch = InducedChannel::new(a, b).unwrap();
            let ba = channel_capacity(&ch);
            let (c, _) = binary_channel_capacity(a, b);
            assert!(
                (ba.capacity_bits - c).abs() < 1e-8,
                "a={a} b={b}: {} vs {c}",
                ba.capacity_bits
            );
            assert!(ba.capacity_bits <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn vertex_protocols_reach_the_vertices() {
        let got: Vec<[f64; 2]> = vertex_protocols()
            .iter()
            .map(|s| induced_channel(s).expectations())
            .collect();
        let want = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        for (g, w) in got.iter().zip(&want) {
            assert!(
                (g[0] - w[0]).abs() < 1e-12 && (g[1] - w[1]).abs() < 1e-12,
                "{g:?}"
            );
        }
        let emb = SignalingScenario::protocol().embed(4);
        assert!((s_plus(&emb) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn search_reaches_one_half() {
        for d in [2, 3] {
            let opt = splus_max_search(d, 8, 11);
            assert!(opt.value <= 0.5 + 1e-9);
            assert!(opt.value >= 0.5 - 1e-4, "d={d}: {}", opt.value);
            assert!((s_plus(&opt.scenario) - opt.value).abs() < 1e-15);
        }
    }

    #[test]
    fn region_sample_is_deterministic_and_bounded() {
        let a = region_sample(3, 400, 5);
        let b = region_sample(3, 400, 5);
        assert_eq!(a, b);
        for [e1, e2] in &a {
            assert!((e1 - e2).abs() <= 1.0 + 1e-9);
            assert!(e1.abs() <= 1.0 + 1e-12 && e2.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn polygon_helpers() {
        assert!((polygon_area(&QUADRANGLE) - 2.0).abs() < 1e-15);
        assert!((polygon_area(&SIGNALING_HEXAGON) - 3.0).abs() < 1e-15);
        let square = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        assert!((polygon_area(&clip_convex(&square, &QUADRANGLE)) - 2.0).abs() < 1e-12);
        let hull = convex_hull(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.5, 0.2],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
        ]);
        assert_eq!(hull.len(), 4);
        assert!((hull_coverage(&SIGNALING_HEXAGON, &QUADRANGLE) - 1.0).abs() < 1e-12);
    }
}
