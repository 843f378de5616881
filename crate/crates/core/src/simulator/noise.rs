use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, CMatrix, HermitianEigen};
use crate::pauli::{Pauli, PauliOp};

/// How the magnitude of each one-local noise vector is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialLaw {
    /// Uniform over the ball `‖a_i‖ ≤ a` (radius ∝ cube root of a uniform variate).
    #[default]
    UniformBall,
    /// Uniform direction, radius uniform in `[0, a]`.
    UniformRadius,
}

/// Noise Hamiltonian acting on the system only, with classical coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Explicit(Vec<(PauliOp, f64)>),
    /// `H = Σ_i a_i · (X_i, Y_i, Z_i)` with one random vector per qubit, `‖a_i‖ ≤ magnitude`.
    OneLocalRandom { magnitude: f64, radial: RadialLaw },
}

impl NoiseModel {
    pub fn isotropic(magnitude: f64) -> Self {
        NoiseModel::OneLocalRandom { magnitude, radial: RadialLaw::UniformBall }
    }

    /// Draws the Pauli terms of one noise realization.
    pub fn sample_terms<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<(PauliOp, f64)> {
        match self {
            NoiseModel::Explicit(terms) => terms.clone(),
            NoiseModel::OneLocalRandom { magnitude, radial } => {
                let mut terms = Vec::with_capacity(3 * n);
                for q in 0..n {
                    let v = sample_vector(*magnitude, *radial, rng);
                    for (letter, coeff) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(v) {
                        terms.push((PauliOp::single(n, q, letter).expect("qubit in range"), coeff));
                    }
                }
                terms
            }
        }
    }

    /// Noise realization for a given seed; explicit models ignore it.
    pub fn sample_hamiltonian(&self, n: usize, seed: u64) -> Result<Hamiltonian> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        build_hamiltonian(self, n, &mut rng)
    }

    pub fn is_random(&self) -> bool {
        matches!(self, NoiseModel::OneLocalRandom { .. })
    }
}

fn sample_vector<R: Rng + ?Sized>(magnitude: f64, radial: RadialLaw, rng: &mut R) -> [f64; 3] {
    // Rejection from the cube gives a point uniform in the unit ball.
    let v = loop {
        let v: [f64; 3] = core::array::from_fn(|_| 2.0 * rng.random::<f64>() - 1.0);
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if r2 <= 1.0 && r2 > 1e-12 {
            break v;
        }
    };
    match radial {
        RadialLaw::UniformBall => v.map(|c| c * magnitude),
        RadialLaw::UniformRadius => {
            let norm = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            let radius = magnitude * rng.random::<f64>();
            v.map(|c| c / norm * radius)
        }
    }
}

/// A Hermitian Hamiltonian with its eigendecomposition cached for exact propagators.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: CMatrix,
    eigen: HermitianEigen,
}

impl Hamiltonian {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(format!("{}x{} matrix is not square", matrix.nrows(), matrix.ncols())));
        }
        let defect = hermiticity_defect(&matrix);
        if defect >= 1e-12 {
            return Err(Error::InvalidArgument(format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
        }
        let eigen = HermitianEigen::new(&matrix)?;
        Ok(Self { matrix, eigen })
    }

    pub fn from_terms(n: usize, terms: &[(PauliOp, f64)]) -> Result<Self> {
        let dim = 1usize << n;
        let mut matrix = CMatrix::zeros(dim, dim);
        for (op, coeff) in terms {
            if op.num_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: op.num_qubits() });
            }
            if !op.is_hermitian() {
                return Err(Error::NotHermitian(*op));
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient of {op} is not finite")));
            }
            matrix += op.to_dense()? * Complex64::new(*coeff, 0.0);
        }
        Self::from_matrix(matrix)
    }

    pub fn zero(n: usize) -> Self {
        let dim = 1usize << n;
        Self::from_matrix(CMatrix::zeros(dim, dim)).expect("zero matrix is Hermitian")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `e^{-iH dt}`.
    pub fn unitary(&self, dt: f64) -> CMatrix {
        self.eigen.map(|e| {
            let (s, c) = libm::sincos(e * dt);
            Complex64::new(c, -s)
        })
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigen.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn build_hamiltonian<R: Rng + ?Sized>(model: &NoiseModel, n: usize, rng: &mut R) -> Result<Hamiltonian> {
    if let NoiseModel::OneLocalRandom { magnitude, .. } = model {
        if !(magnitude.is_finite() && *magnitude >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise magnitude {magnitude} must be finite and >= 0")));
        }
    }
    Hamiltonian::from_terms(n, &model.sample_terms(n, rng))
}

/// `e^{-iH dt}`, exact through the eigendecomposition of `H`.
pub fn unitary_step(h: &Hamiltonian, dt: f64) -> CMatrix {
    h.unitary(dt)
}
