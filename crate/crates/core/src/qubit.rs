//! Bloch-sphere formulas for a single qubit.
//!
//! A state is a vector `v` in the unit ball, `rho = (1 + v·σ)/2`; a
//! dichotomic observable other than `±1` is `a·σ` for a unit vector `a`.
//! Dynamics between the two measurements is a rotation `R` acting on
//! states, so after Alice's collapse to `r a` Bob sees `r R(a)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{sigma_x, sigma_y, sigma_z, ComplexMatrix, C64};
use crate::operator::{DichotomicObservable, Outcome, PureState, UnitaryMatrix, INVARIANT_TOL};
use crate::random::{random_unit_vector, rng_from_seed, sub_seed};
use crate::scenario::TemporalScenario;

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    /// A state vector, `|v| <= 1`.
    pub fn state(v: [f64; 3]) -> Result<Self> {
        check_finite(&v)?;
        let n = norm3(&v);
        if n > 1.0 + INVARIANT_TOL {
            return Err(Error::Bloch(format!("state vector has norm {n} > 1")));
        }
        Ok(Self(v))
    }

    /// An observable axis, `|a| = 1`.
    pub fn axis(v: [f64; 3]) -> Result<Self> {
        check_finite(&v)?;
        let n = norm3(&v);
        if (n - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::Bloch(format!(
                "observable axis has norm {n}, expected 1"
            )));
        }
        Ok(Self(v))
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        check_finite(&v)?;
        let n = norm3(&v);
        if n < 1e-300 {
            return Err(Error::Bloch("cannot normalize the zero vector".into()));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn x() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(&self.0)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot3(&self.0, &other.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self(self.0.map(|x| x * t))
    }

    fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= INVARIANT_TOL
    }

    /// `v·σ`.
    pub fn pauli_combination(&self) -> ComplexMatrix {
        let [x, y, z] = self.0;
        &(&sigma_x().scale_real(x) + &sigma_y().scale_real(y)) + &sigma_z().scale_real(z)
    }

    /// `a·σ` for a unit axis.
    pub fn observable(&self) -> Result<DichotomicObservable> {
        if !self.is_unit() {
            return Err(Error::Bloch(format!(
                "observable axis has norm {}, expected 1",
                self.norm()
            )));
        }
        DichotomicObservable::new(self.pauli_combination().hermitize())
    }

    /// `(1 + v·σ)/2`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        (&ComplexMatrix::identity(2) + &self.pauli_combination()).scale_real(0.5)
    }

    /// Pure state with this Bloch vector; requires `|v| = 1`.
    pub fn pure_state(&self) -> Result<PureState> {
        if !self.is_unit() {
            return Err(Error::Bloch(format!(
                "pure states need |v| = 1, found {}",
                self.norm()
            )));
        }
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        Ok(crate::operator::qubit_state(theta, phi))
    }
}

fn check_finite(v: &[f64; 3]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Proper rotation of the Bloch ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                dev += (g - target).powi(2);
            }
        }
        if dev.sqrt() > INVARIANT_TOL {
            return Err(Error::Bloch(format!(
                "matrix is not orthogonal (residual {:e})",
                dev.sqrt()
            )));
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > INVARIANT_TOL {
            return Err(Error::Bloch(format!(
                "rotation must have determinant +1, found {det}"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Right-handed rotation by `angle` about the unit `axis`.
    pub fn about_axis(axis: &BlochVector, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        let [x, y, z] = axis.0;
        Self::from_unit_quaternion([c, s * x, s * y, s * z])
    }

    /// Rotation matrix of the unit quaternion `(w, x, y, z)`.
    pub fn from_unit_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|t| t / n);
        Self([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }

    /// Unit quaternion with `w >= 0` (Shepperd's branch selection).
    pub fn quaternion(&self) -> [f64; 4] {
        let m = &self.0;
        let tr = m[0][0] + m[1][1] + m[2][2];
        let q = if tr > m[0][0].max(m[1][1]).max(m[2][2]) {
            let w = 0.5 * (1.0 + tr).sqrt();
            let f = 0.25 / w;
            [
                w,
                (m[2][1] - m[1][2]) * f,
                (m[0][2] - m[2][0]) * f,
                (m[1][0] - m[0][1]) * f,
            ]
        } else if m[0][0] >= m[1][1] && m[0][0] >= m[2][2] {
            let x = 0.5 * (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt();
            let f = 0.25 / x;
            [
                (m[2][1] - m[1][2]) * f,
                x,
                (m[0][1] + m[1][0]) * f,
                (m[0][2] + m[2][0]) * f,
            ]
        } else if m[1][1] >= m[2][2] {
            let y = 0.5 * (1.0 - m[0][0] + m[1][1] - m[2][2]).sqrt();
            let f = 0.25 / y;
            [
                (m[0][2] - m[2][0]) * f,
                (m[0][1] + m[1][0]) * f,
                y,
                (m[1][2] + m[2][1]) * f,
            ]
        } else {
            let z = 0.5 * (1.0 - m[0][0] - m[1][1] + m[2][2]).sqrt();
            let f = 0.25 / z;
            [
                (m[1][0] - m[0][1]) * f,
                (m[0][2] + m[2][0]) * f,
                (m[1][2] + m[2][1]) * f,
                z,
            ]
        };
        if q[0] < 0.0 {
            q.map(|t| -t)
        } else {
            q
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.0
    }

    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        let m = &self.0;
        BlochVector([0, 1, 2].map(|i| dot3(&m[i], &v.0)))
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([0, 1, 2].map(|i| [0, 1, 2].map(|j| m[j][i])))
    }

    /// `U` with `U (v·σ) U^dagger = (R v)·σ`.
    pub fn unitary(&self) -> UnitaryMatrix {
        let [w, x, y, z] = self.quaternion();
        // U = w - i (x σx + y σy + z σz)
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(w, -z), C64::new(-y, -x)],
            vec![C64::new(y, -x), C64::new(w, z)],
        ])
        .expect("2x2");
        UnitaryMatrix::new(m).expect("unit quaternions give unitaries")
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = random_unit_vector(4, rng);
        Self::from_unit_quaternion([v[0], v[1], v[2], v[3]])
    }
}

/// `(1 + r a·v)/2`.
pub fn bloch_outcome_prob(v: &BlochVector, a: &BlochVector, r: Outcome) -> Result<f64> {
    BlochVector::state(v.0)?;
    BlochVector::axis(a.0)?;
    Ok((0.5 * (1.0 + r.sign() * a.dot(v))).clamp(0.0, 1.0))
}

/// Post-measurement Bloch vector `r a`.
pub fn bloch_collapse(a: &BlochVector, r: Outcome) -> Result<BlochVector> {
    BlochVector::axis(a.0)?;
    Ok(a.scaled(r.sign()))
}

/// Temporal correlator `R(a)·b`; independent of the initial state.
pub fn bloch_correlator(a: &BlochVector, b: &BlochVector, rotation: &Rotation) -> Result<f64> {
    BlochVector::axis(a.0)?;
    BlochVector::axis(b.0)?;
    Ok(rotation.apply(a).dot(b))
}

/// `a1·(b1 + b2) + a2·(b1 - b2)`.
pub fn chsh_qubit(a: &[BlochVector; 2], b: &[BlochVector; 2]) -> f64 {
    a[0].dot(&b[0]) + a[0].dot(&b[1]) + a[1].dot(&b[0]) - a[1].dot(&b[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitChshOptimum {
    pub value: f64,
    pub alice: [BlochVector; 2],
    pub bob: [BlochVector; 2],
}

impl QubitChshOptimum {
    /// The settings as matrices, with `|0>` as initial state and no dynamics.
    pub fn scenario(&self) -> TemporalScenario {
        let obs = |v: &BlochVector| v.observable().expect("unit axes");
        TemporalScenario::new(
            PureState::basis(2, 0),
            self.alice.iter().map(obs).collect(),
            self.bob.iter().map(obs).collect(),
            None,
        )
        .expect("qubit scenario")
    }
}

/// Settings attaining `2√2`: `a1 = z`, `a2 = x`, `b± = (z ± x)/√2`.
pub fn tsirelson_settings() -> QubitChshOptimum {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let alice = [BlochVector::z(), BlochVector::x()];
    let bob = [BlochVector([h, 0.0, h]), BlochVector([-h, 0.0, h])];
    QubitChshOptimum {
        value: chsh_qubit(&alice, &bob),
        alice,
        bob,
    }
}

pub const QUBIT_CHSH_RESTARTS: usize = 50;
pub const QUBIT_CHSH_SEED: u64 = 0x7e51_2e15;

/// Multi-start search for the largest qubit CHSH value. The initial state
/// plays no role since the correlators do not depend on it.
pub fn qubit_chsh_max() -> QubitChshOptimum {
    qubit_chsh_max_with(QUBIT_CHSH_RESTARTS, QUBIT_CHSH_SEED)
}

pub fn qubit_chsh_max_with(restarts: usize, seed: u64) -> QubitChshOptimum {
    let mut best: Option<QubitChshOptimum> = None;
    for i in 0..restarts.max(1) {
        let mut rng = rng_from_seed(sub_seed(seed, i as u64));
        let mut v: [[f64; 3]; 4] = std::array::from_fn(|_| {
            let u = random_unit_vector(3, &mut rng);
            [u[0], u[1], u[2]]
        });
        projected_ascent(&mut v);
        let alice = [BlochVector(v[0]), BlochVector(v[1])];
        let bob = [BlochVector(v[2]), BlochVector(v[3])];
        let cand = QubitChshOptimum {
            value: chsh_qubit(&alice, &bob),
            alice,
            bob,
        };
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    best.expect("at least one restart")
}

/// Gradient steps on `(a1, a2, b1, b2)`, each renormalized onto the sphere.
fn projected_ascent(v: &mut [[f64; 3]; 4]) {
    const STEP: f64 = 0.5;
    let add =
        |x: &[f64; 3], y: &[f64; 3], s: f64| [x[0] + s * y[0], x[1] + s * y[1], x[2] + s * y[2]];
    for _ in 0..2000 {
        let grads = [
            add(&v[2], &v[3], 1.0),
            add(&v[2], &v[3], -1.0),
            add(&v[0], &v[1], 1.0),
            add(&v[0], &v[1], -1.0),
        ];
        let mut moved = 0.0f64;
        for (x, g) in v.iter_mut().zip(&grads) {
            let y = add(x, g, STEP);
            let n = norm3(&y);
            if n < 1e-300 {
                continue;
            }
            let y = y.map(|t| t / n);
            moved = moved.max((0..3).map(|i| (y[i] - x[i]).abs()).fold(0.0, f64::max));
            *x = y;
        }
        if moved < 1e-15 {
            break;
        }
    }
}
