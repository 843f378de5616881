use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, hermitize, trace, CMatrix, HermitianEigen};

pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// A validated density matrix: unit trace, Hermitian, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        validate(&matrix)?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix without checking it; callers must guarantee the invariants.
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > 0.0) || !psi.len().is_power_of_two() {
            return Err(Error::InvalidState(format!("cannot build a state from a length-{} vector", psi.len())));
        }
        let dim = psi.len();
        let matrix = CMatrix::from_fn(dim, dim, |r, c| psi[r] * psi[c].conj() / norm2);
        Self::new(matrix)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self { matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// `Tr[ρ A]`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        crate::linalg::trace_product(&self.matrix, op)
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        let root = HermitianEigen::new(&self.matrix)?.map(|v| Complex64::new(libm::sqrt(v.max(0.0)), 0.0));
        let mut inner = &root * &other.matrix * &root;
        hermitize(&mut inner);
        let eig = HermitianEigen::new(&inner)?;
        let s: f64 = eig.values.iter().map(|v| libm::sqrt(v.max(0.0))).sum();
        Ok(s * s)
    }
}

/// Checks trace, Hermiticity and positivity against the module tolerances.
pub fn validate(m: &CMatrix) -> Result<()> {
    if !m.is_square() || !m.nrows().is_power_of_two() {
        return Err(Error::InvalidState(format!("{}x{} is not a qubit density matrix", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entries".into()));
    }
    let tr = trace(m);
    if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::InvalidState(format!("Hermiticity defect {defect:.3e}")));
    }
    let mut sym = m.clone();
    hermitize(&mut sym);
    let min = HermitianEigen::new(&sym)?.min_value();
    if min < -POSITIVITY_TOLERANCE {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}
