//! Seeded random instances: states, unitaries, observables, scenarios.
//!
//! Every stochastic entry point takes an explicit 64-bit seed. Parallel
//! sweeps derive one sub-seed per shard with [`sub_seed`], so results do not
//! depend on the thread count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::operator::{DichotomicObservable, PureState, UnitaryMatrix};
use crate::scenario::TemporalScenario;

pub type Rng64 = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `seed + index`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    loop {
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let ov = linalg::inner(c, &v);
                    v = linalg::sub_vec(&v, &linalg::scale_vec(c, ov));
                }
            }
            let n = linalg::norm(&v);
            if n < 1e-8 {
                ok = false;
                break;
            }
            cols.push(linalg::scale_vec(&v, C64::new(1.0 / n, 0.0)));
        }
        if !ok {
            continue;
        }
        let mut m = ComplexMatrix::zeros(dim);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..dim {
                m[(i, j)] = c[i];
            }
        }
        if let Ok(u) = UnitaryMatrix::new(m) {
            return u;
        }
    }
}

/// `U diag(signature) U^dagger` for Haar `U`.
pub fn observable_with_signature<R: Rng + ?Sized>(
    signature: &[i8],
    rng: &mut R,
) -> DichotomicObservable {
    let dim = signature.len();
    let u = random_unitary(dim, rng);
    let diag: Vec<C64> = signature
        .iter()
        .map(|&s| C64::new(f64::from(s), 0.0))
        .collect();
    let m = u
        .matrix()
        .matmul(&ComplexMatrix::diagonal(&diag))
        .matmul(&u.matrix().adjoint());
    DichotomicObservable::new(m.hermitize()).expect("conjugated signature is dichotomic")
}

/// Random dichotomic observable; each eigenvalue sign is a fair coin, so
/// `±1` itself occurs with probability `2^{1-d}`.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DichotomicObservable {
    let signature: Vec<i8> = (0..dim)
        .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
        .collect();
    observable_with_signature(&signature, rng)
}

/// Random observable with both eigenvalues present.
pub fn random_nontrivial_observable<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> DichotomicObservable {
    let signature = random_nontrivial_signature(dim, rng);
    observable_with_signature(&signature, rng)
}

/// Signature with `rank` plus signs, `1 <= rank <= d - 1` uniform.
pub fn random_nontrivial_signature<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<i8> {
    assert!(dim >= 2);
    let rank = rng.random_range(1..dim);
    (0..dim).map(|i| if i < rank { 1 } else { -1 }).collect()
}

/// Random temporal scenario; `with_dynamics` adds a Haar unitary between
/// the two measurements.
pub fn random_scenario<R: Rng + ?Sized>(
    dim: usize,
    m: usize,
    n: usize,
    with_dynamics: bool,
    rng: &mut R,
) -> TemporalScenario {
    let psi = random_state(dim, rng);
    let alice = (0..m).map(|_| random_observable(dim, rng)).collect();
    let bob = (0..n).map(|_| random_observable(dim, rng)).collect();
    let dynamics = with_dynamics.then(|| random_unitary(dim, rng));
    TemporalScenario::new(psi, alice, bob, dynamics).expect("random scenario is consistent")
}

/// Uniform point in the closed unit ball of `R^dim`.
pub fn random_ball_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// Uniform point on the unit sphere of `R^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| sub_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn random_objects_satisfy_invariants() {
        let mut rng = rng_from_seed(1);
        for d in 1..7 {
            let u = random_unitary(d, &mut rng);
            assert!(u.matrix().unitary_residual() < 1e-12);
            let a = random_observable(d, &mut rng);
            assert!(DichotomicObservable::new(a.matrix().clone()).is_ok());
            let s = random_state(d, &mut rng);
            assert!((linalg::norm(s.amplitudes()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_scenario(3, 2, 2, true, &mut rng_from_seed(99));
        let b = random_scenario(3, 2, 2, true, &mut rng_from_seed(99));
        assert_eq!(a, b);
    }
}
