//! Quantum primitives: pure states, dichotomic observables and unitaries.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigensystem, ComplexMatrix, C64, ZERO};

/// Default tolerance for operator invariants (Hermiticity, involution,
/// unitarity, normalization).
pub const INVARIANT_TOL: f64 = 1e-9;

/// Default tolerance for reconstructions such as `V diag V^dagger`.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, INVARIANT_TOL)
    }

    pub fn with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape(
                "state must have at least one amplitude".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = linalg::norm(&amplitudes);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(linalg::scale_vec(&amplitudes, C64::new(1.0 / norm, 0.0)))
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { amplitudes: amps }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|psi> ⊗ |phi>`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        PureState { amplitudes: amps }
    }
}

/// Hermitian involution: outcomes are labelled ±1.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomicObservable {
    matrix: ComplexMatrix,
}

impl DichotomicObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, INVARIANT_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        matrix.check_finite()?;
        let residual = matrix.hermitian_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        let residual = matrix
            .matmul(&matrix)
            .distance(&ComplexMatrix::identity(matrix.dim()));
        if residual > tol {
            return Err(Error::NotInvolution { residual });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `2|u><u| - 1` for a nonzero `u`: +1 on `u`, -1 on its complement.
    pub fn from_ray(u: &[C64]) -> Result<Self> {
        let p = ComplexMatrix::projector_onto(u);
        if p.trace().re < 0.5 {
            return Err(Error::Shape("ray vector must be nonzero".into()));
        }
        Self::new(&p.scale_real(2.0) - &ComplexMatrix::identity(u.len()))
    }

    /// `2P - 1` for the projector `P` onto the +1 eigenspace.
    pub fn from_projector(p: &ComplexMatrix) -> Result<Self> {
        Self::new(&p.scale_real(2.0) - &ComplexMatrix::identity(p.dim()))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: -&self.matrix,
        }
    }

    /// `U^dagger a U`.
    pub fn heisenberg(&self, u: &UnitaryMatrix) -> Self {
        let m = u.matrix().adjoint().matmul(&self.matrix).matmul(u.matrix());
        Self {
            matrix: m.hermitize(),
        }
    }

    /// `a ⊗ 1_dim`.
    pub fn tensor_identity_right(&self, dim: usize) -> Self {
        Self {
            matrix: self.matrix.kron(&ComplexMatrix::identity(dim)),
        }
    }

    /// `1_dim ⊗ a`.
    pub fn tensor_identity_left(&self, dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).kron(&self.matrix),
        }
    }

    /// Embeds `a` as the top-left block of a larger space, identity elsewhere.
    pub fn embed(&self, dim: usize) -> Self {
        Self {
            matrix: self.matrix.direct_sum_identity(dim),
        }
    }
}

/// Unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.check_finite()?;
        let residual = matrix.unitary_residual();
        if residual > INVARIANT_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.apply(v)
    }

    /// `exp(i H)` for Hermitian `H`.
    pub fn exp_i(h: &ComplexMatrix) -> Result<Self> {
        let es = hermitian_eigensystem(h, INVARIANT_TOL)?;
        Ok(Self {
            matrix: es.map(|l| C64::new(l.cos(), l.sin())),
        })
    }
}

/// Outcome label of a dichotomic measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Minus,
    Plus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Minus, Outcome::Plus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Minus => -1.0,
            Outcome::Plus => 1.0,
        }
    }

    /// Index in tables and JSON: `0 ↔ -1`, `1 ↔ +1`.
    pub fn index(self) -> usize {
        match self {
            Outcome::Minus => 0,
            Outcome::Plus => 1,
        }
    }

    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Minus => Outcome::Plus,
            Outcome::Plus => Outcome::Minus,
        }
    }
}

/// `(1 + r a) / 2`.
pub fn projector(a: &DichotomicObservable, r: Outcome) -> ComplexMatrix {
    let id = ComplexMatrix::identity(a.dim());
    (&id + &a.matrix().scale_real(r.sign())).scale_real(0.5)
}

/// `<psi|A|psi>`.
pub fn expectation(psi: &PureState, a: &ComplexMatrix) -> Result<C64> {
    if psi.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: psi.dim(),
        });
    }
    Ok(a.sandwich(psi.amplitudes(), psi.amplitudes()))
}

/// Number of real parameters describing a Hermitian generator on `C^d`.
pub fn parameter_count(dim: usize) -> usize {
    dim * dim
}

/// Hermitian matrix from `d^2` reals: the `d` diagonal entries first, then
/// `(re, im)` of each strictly upper entry in row-major order.
pub fn hermitian_from_parameters(dim: usize, params: &[f64]) -> Result<ComplexMatrix> {
    if params.len() != parameter_count(dim) {
        return Err(Error::ParameterCount {
            expected: parameter_count(dim),
            found: params.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut idx = dim;
    for i in 0..dim {
        for j in i + 1..dim {
            let z = C64::new(params[idx], params[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    Ok(h)
}

/// Inverse of [`hermitian_from_parameters`].
pub fn parameters_from_hermitian(h: &ComplexMatrix) -> Vec<f64> {
    let dim = h.dim();
    let mut params = Vec::with_capacity(parameter_count(dim));
    params.extend((0..dim).map(|i| h[(i, i)].re));
    for i in 0..dim {
        for j in i + 1..dim {
            params.push(h[(i, j)].re);
            params.push(h[(i, j)].im);
        }
    }
    params
}

/// `U diag(signature) U^dagger` with `U = exp(i H(params))`.
pub fn observable_from_parameters(
    dim: usize,
    signature: &[i8],
    params: &[f64],
) -> Result<DichotomicObservable> {
    if signature.len() != dim {
        return Err(Error::Shape(format!(
            "signature of length {} for dimension {dim}",
            signature.len()
        )));
    }
    if signature.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::Shape("signature entries must be ±1".into()));
    }
    let h = hermitian_from_parameters(dim, params)?;
    let u = UnitaryMatrix::exp_i(&h)?;
    let diag: Vec<f64> = signature.iter().map(|&s| f64::from(s)).collect();
    let m = u
        .matrix()
        .matmul(&ComplexMatrix::real_diagonal(&diag))
        .matmul(&u.matrix().adjoint());
    DichotomicObservable::new(m.hermitize())
}

/// Finds a signature and parameters reproducing `a` through
/// [`observable_from_parameters`].
///
/// The eigenvector unitary `V` of `a` is diagonalized through a generic real
/// combination of its Hermitian and anti-Hermitian parts; the phases of its
/// eigenvalues give a Hermitian logarithm `H` with `exp(iH) = V`.
pub fn observable_parameters(a: &DichotomicObservable) -> Result<(Vec<i8>, Vec<f64>)> {
    let es = hermitian_eigensystem(a.matrix(), INVARIANT_TOL)?;
    let signature: Vec<i8> = es
        .values
        .iter()
        .map(|&l| if l >= 0.0 { 1 } else { -1 })
        .collect();
    let v = &es.vectors;
    let re = v.hermitize();
    let im = (v - &v.adjoint()).scale(C64::new(0.0, -0.5));
    // an irrational weight keeps eigenvalues e^{i phi} with distinct phases apart
    let mix = &re + &im.scale_real(0.739_085_133_215_160_6);
    let ws = hermitian_eigensystem(&mix, 1e-7)?;
    let d = a.dim();
    let mut phases = Vec::with_capacity(d);
    for k in 0..d {
        let w = ws.eigenvector(k);
        let lambda = v.sandwich(&w, &w);
        phases.push(C64::new(lambda.arg(), 0.0));
    }
    let w = &ws.vectors;
    let h = w
        .matmul(&ComplexMatrix::diagonal(&phases))
        .matmul(&w.adjoint())
        .hermitize();
    Ok((signature, parameters_from_hermitian(&h)))
}

/// Reflection-type observable mapping the unit vector `from` onto the unit
/// vector `to`, where `<from|to>` is real. Acts as `+1` on `from` when the
/// two coincide.
pub fn reflection_between(from: &[C64], to: &[C64]) -> DichotomicObservable {
    let d = from.len();
    let diff = linalg::sub_vec(from, to);
    if linalg::norm(&diff) < 1e-12 {
        return DichotomicObservable::from_ray(from)
            .unwrap_or_else(|_| DichotomicObservable::identity(d));
    }
    // 1 - 2 |w><w|, w = (from - to)/|from - to|
    let p = ComplexMatrix::projector_onto(&diff);
    let m = &ComplexMatrix::identity(d) - &p.scale_real(2.0);
    DichotomicObservable {
        matrix: m.hermitize(),
    }
}

/// `cos(theta) σz + sin(theta) σx`.
pub fn qubit_xz_observable(theta: f64) -> DichotomicObservable {
    let (s, c) = theta.sin_cos();
    let m = ComplexMatrix::from_real(2, &[c, s, s, -c]).unwrap();
    DichotomicObservable { matrix: m }
}

/// Qubit state with Bloch angles `(theta, phi)`.
pub fn qubit_state(theta: f64, phi: f64) -> PureState {
    let amps = vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::new(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
    ];
    PureState { amplitudes: amps }
}

pub fn x_plus() -> PureState {
    qubit_state(PI / 2.0, 0.0)
}

pub fn pauli_observable(which: char) -> DichotomicObservable {
    let matrix = match which {
        'x' => linalg::sigma_x(),
        'y' => linalg::sigma_y(),
        'z' => linalg::sigma_z(),
        _ => panic!("unknown Pauli `{which}`"),
    };
    DichotomicObservable { matrix }
}
