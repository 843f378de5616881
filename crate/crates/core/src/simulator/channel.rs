use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, CMatrix, ZERO};
use crate::pauli::PauliOp;

/// A completely positive trace-preserving map on `n`-qubit density matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    /// `[(1+ζ)/2]• + [(1-ζ)/2]σ•σ`: projective at `ζ = 0`, identity at `ζ = 1`.
    PauliMeasurement { op: PauliOp, zeta: f64 },
    /// `Σ_k K_k • K_k^†`.
    Kraus(Vec<CMatrix>),
}

/// Unread (weak) measurement of a Hermitian Pauli operator.
pub fn measurement_channel(op: &PauliOp, zeta: f64) -> Result<Channel> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian(*op));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::InvalidArgument(format!("zeta = {zeta} outside [0, 1]")));
    }
    Ok(Channel::PauliMeasurement { op: *op, zeta })
}

/// `σρσ` for a Pauli `σ` given by dense-order masks, written into `out`.
///
/// `σ_{a, a⊕x} = ω (-1)^{|(a⊕x)∧z|}` with `|ω| = 1`, so the global phase drops out.
pub(crate) fn pauli_sandwich_into(rho: &CMatrix, masks: (usize, usize), out: &mut CMatrix) {
    let (xm, zm) = masks;
    let dim = rho.nrows();
    for c in 0..dim {
        let cs = c ^ xm;
        let c_odd = (cs & zm).count_ones() & 1;
        for r in 0..dim {
            let rs = r ^ xm;
            let v = rho[(rs, cs)];
            out[(r, c)] = if ((rs & zm).count_ones() & 1) ^ c_odd == 1 { -v } else { v };
        }
    }
}

pub fn pauli_sandwich(rho: &CMatrix, op: &PauliOp) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    pauli_sandwich_into(rho, op.dense_masks(), &mut out);
    out
}

impl Channel {
    /// Mixture `Σ_k w_k U_k • U_k^†` of unitaries with nonnegative weights.
    pub fn mixed_unitary(terms: Vec<(f64, CMatrix)>) -> Result<Self> {
        let mut kraus = Vec::with_capacity(terms.len());
        for (w, u) in terms {
            if !(w >= 0.0) {
                return Err(Error::InvalidArgument(format!("negative mixture weight {w}")));
            }
            if w > 0.0 {
                kraus.push(u * Complex64::new(libm::sqrt(w), 0.0));
            }
        }
        Ok(Channel::Kraus(kraus))
    }

    pub fn identity(dim: usize) -> Self {
        Channel::Kraus(alloc::vec![CMatrix::identity(dim, dim)])
    }

    /// Dimension acted on, if fixed by the representation.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Channel::PauliMeasurement { op, .. } => Some(1 << op.num_qubits()),
            Channel::Kraus(ks) => ks.first().map(|k| k.nrows()),
        }
    }

    /// `max |Σ K^†K - I|`.
    pub fn trace_preservation_defect(&self) -> f64 {
        match self {
            Channel::PauliMeasurement { .. } => 0.0,
            Channel::Kraus(ks) => {
                let Some(first) = ks.first() else { return f64::INFINITY };
                let dim = first.nrows();
                let sum = ks.iter().fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
                max_abs_diff(&sum, &CMatrix::identity(dim, dim))
            }
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = rho.clone();
        let mut scratch = CMatrix::zeros(rho.nrows(), rho.ncols());
        self.apply_in_place(&mut out, &mut scratch);
        out
    }

    /// Heisenberg-picture dual `Σ_k K_k^† • K_k`.
    pub fn apply_adjoint(&self, op: &CMatrix) -> CMatrix {
        match self {
            // Self-dual: Hermitian Kraus operators.
            Channel::PauliMeasurement { .. } => self.apply(op),
            Channel::Kraus(ks) => ks.iter().fold(CMatrix::zeros(op.nrows(), op.ncols()), |acc, k| {
                acc + k.adjoint() * op * k
            }),
        }
    }

    /// Applies the channel to `rho`, using `scratch` (same shape) as workspace.
    pub(crate) fn apply_in_place(&self, rho: &mut CMatrix, scratch: &mut CMatrix) {
        match self {
            Channel::PauliMeasurement { op, zeta } => {
                let flip = 0.5 * (1.0 - zeta);
                if flip == 0.0 {
                    return;
                }
                let keep = 1.0 - flip;
                pauli_sandwich_into(rho, op.dense_masks(), scratch);
                rho.zip_apply(scratch, |r, s| *r = *r * keep + s * flip);
            }
            Channel::Kraus(ks) => {
                let dim = rho.nrows();
                let mut acc = CMatrix::from_element(dim, dim, ZERO);
                for k in ks {
                    k.mul_to(rho, scratch);
                    acc.gemm(Complex64::new(1.0, 0.0), scratch, &k.adjoint(), Complex64::new(1.0, 0.0));
                }
                *rho = acc;
            }
        }
    }

    /// `max_{a,b} max |Φ(|a⟩⟨b|) - Ψ(|a⟩⟨b|)|` over the matrix units.
    pub fn max_deviation(&self, other: &Channel, dim: usize) -> Result<f64> {
        for d in [self.dim(), other.dim()].into_iter().flatten() {
            if d != dim {
                return Err(Error::DimensionMismatch { left: dim, right: d });
            }
        }
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let mut unit = CMatrix::zeros(dim, dim);
                unit[(a, b)] = Complex64::new(1.0, 0.0);
                worst = worst.max(max_abs_diff(&self.apply(&unit), &other.apply(&unit)));
            }
        }
        Ok(worst)
    }
}
