//! Cheap smooth parametrizations for the variational searches.
//!
//! An observable of rank `r` (the dimension of its +1 eigenspace) is
//! encoded by a `d x r` complex frame `M`: with `Q` the Gram–Schmidt
//! orthonormalization of `M`, the observable is `2 Q Q^dagger - 1`. States
//! are unnormalized complex vectors. Both maps are onto and need no matrix
//! exponential, so an objective evaluation costs a few matrix-vector
//! products.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, hermitian_eigensystem, ComplexMatrix, C64, ZERO};
use crate::operator::{DichotomicObservable, PureState, INVARIANT_TOL};

pub fn state_parameter_count(dim: usize) -> usize {
    2 * dim
}

pub fn frame_parameter_count(dim: usize, rank: usize) -> usize {
    2 * dim * rank
}

/// `(re, im)` pairs, normalized. A zero vector maps to `|0>`.
pub fn state_from_reals(p: &[f64]) -> Vec<C64> {
    let v: Vec<C64> = p.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    let n = linalg::norm(&v);
    if n < 1e-300 {
        let mut e = vec![ZERO; v.len()];
        e[0] = C64::new(1.0, 0.0);
        return e;
    }
    linalg::scale_vec(&v, C64::new(1.0 / n, 0.0))
}

pub fn reals_from_state(psi: &PureState) -> Vec<f64> {
    psi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Column-major frame of `rank` columns, each as `(re, im)` pairs.
pub fn frame_observable(dim: usize, rank: usize, p: &[f64]) -> ComplexMatrix {
    debug_assert_eq!(p.len(), frame_parameter_count(dim, rank));
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(rank);
    for col in p.chunks(2 * dim).take(rank) {
        let mut v: Vec<C64> = col.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        let scale = linalg::norm(&v);
        for u in &q {
            let ov = linalg::inner(u, &v);
            v = linalg::sub_vec(&v, &linalg::scale_vec(u, ov));
        }
        let n = linalg::norm(&v);
        if n <= 1e-12 * scale.max(1e-300) {
            continue;
        }
        q.push(linalg::scale_vec(&v, C64::new(1.0 / n, 0.0)));
    }
    let mut m = ComplexMatrix::identity(dim).scale_real(-1.0);
    for u in &q {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += 2.0 * u[i] * u[j].conj();
            }
        }
    }
    m
}

/// Frame spanning the +1 eigenspace of `a`.
pub fn frame_from_observable(a: &DichotomicObservable) -> (usize, Vec<f64>) {
    let es = hermitian_eigensystem(a.matrix(), INVARIANT_TOL).expect("observables are Hermitian");
    let mut p = Vec::new();
    let mut rank = 0;
    for (k, &l) in es.values.iter().enumerate() {
        if l > 0.0 {
            rank += 1;
            p.extend(es.eigenvector(k).iter().flat_map(|z| [z.re, z.im]));
        }
    }
    (rank, p)
}

pub fn gaussian_reals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Layout of several frames and one state in a single parameter vector.
#[derive(Clone, Debug)]
pub struct Layout {
    pub dim: usize,
    pub ranks: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl Layout {
    /// State first, then one frame per entry of `ranks`.
    pub fn new(dim: usize, ranks: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(ranks.len());
        let mut at = state_parameter_count(dim);
        for &r in &ranks {
            offsets.push(at);
            at += frame_parameter_count(dim, r);
        }
        Self {
            dim,
            ranks,
            offsets,
            total: at,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn state(&self, p: &[f64]) -> Vec<C64> {
        state_from_reals(&p[..state_parameter_count(self.dim)])
    }

    pub fn observable(&self, p: &[f64], i: usize) -> ComplexMatrix {
        let len = frame_parameter_count(self.dim, self.ranks[i]);
        frame_observable(
            self.dim,
            self.ranks[i],
            &p[self.offsets[i]..self.offsets[i] + len],
        )
    }

    pub fn pack(&self, psi: &PureState, frames: &[Vec<f64>]) -> Vec<f64> {
        let mut p = reals_from_state(psi);
        for f in frames {
            p.extend_from_slice(f);
        }
        assert_eq!(p.len(), self.total);
        p
    }

    /// Validated state and observables at `p`.
    pub fn decode(&self, p: &[f64]) -> (PureState, Vec<DichotomicObservable>) {
        let psi = PureState::new_unchecked(self.state(p));
        let obs = (0..self.ranks.len())
            .map(|i| DichotomicObservable::new_unchecked(self.observable(p, i).hermitize()))
            .collect();
        (psi, obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{observable_with_signature, rng_from_seed};

    #[test]
    fn frames_give_observables_of_the_requested_rank() {
        let mut rng = rng_from_seed(1);
        for d in 1..6 {
            for r in 0..=d {
                let p = gaussian_reals(frame_parameter_count(d, r), &mut rng);
                let m = frame_observable(d, r, &p);
                let a = DichotomicObservable::new(m.clone()).unwrap();
                assert!((m.trace().re - (2.0 * r as f64 - d as f64)).abs() < 1e-9);
                let (rank, back) = frame_from_observable(&a);
                assert_eq!(rank, r);
                assert!(frame_observable(d, r, &back).distance(&m) < 1e-9);
            }
        }
    }

    #[test]
    fn frame_round_trip_from_random_observable() {
        let mut rng = rng_from_seed(2);
        let a = observable_with_signature(&[1, 1, -1, -1, -1], &mut rng);
        let (rank, p) = frame_from_observable(&a);
        assert_eq!(rank, 2);
        assert!(frame_observable(5, 2, &p).distance(a.matrix()) < 1e-9);
    }

    #[test]
    fn layout_decodes_consistently() {
        let mut rng = rng_from_seed(3);
        let layout = Layout::new(3, vec![1, 2, 0]);
        let p = gaussian_reals(layout.len(), &mut rng);
        let (psi, obs) = layout.decode(&p);
        assert!(PureState::new(psi.amplitudes().to_vec()).is_ok());
        assert_eq!(obs.len(), 3);
        assert_eq!(
            obs[2].matrix(),
            &ComplexMatrix::identity(3).scale_real(-1.0)
        );
        let frames: Vec<Vec<f64>> = obs.iter().map(|a| frame_from_observable(a).1).collect();
        let again = layout.pack(&psi, &frames);
        let (_, obs2) = layout.decode(&again);
        for (x, y) in obs.iter().zip(&obs2) {
            assert!(x.matrix().distance(y.matrix()) < 1e-9);
        }
    }
}
