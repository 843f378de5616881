//! Encoding, decoding and basis-state bookkeeping of the three-qubit memory.
//!
//! Qubit 2 carries the logical state; qubit 1 starts in `|0⟩` and qubit 3 in `|+⟩`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cplx, partial_trace_keep, CMatrix, ONE, ZERO};
use crate::pauli::PauliOp;
use crate::simulator::{validate, DensityMatrix};

/// Final readout outcomes of `Z1` and `X3` (0 for eigenvalue +1, 1 for -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameOutcome {
    pub nu_z: u8,
    pub nu_x: u8,
}

impl FrameOutcome {
    pub fn all() -> [FrameOutcome; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(nu_z, nu_x)| FrameOutcome { nu_z, nu_x })
    }

    /// Single-qubit frame correction `X^{ν_z} Z^{ν_x}` on the data qubit.
    pub fn correction(&self) -> CMatrix {
        let mut c = CMatrix::identity(2, 2);
        if self.nu_x == 1 {
            c = PauliOp::parse("Z1", 1).expect("static").to_dense().expect("1 qubit") * c;
        }
        if self.nu_z == 1 {
            c = PauliOp::parse("X1", 1).expect("static").to_dense().expect("1 qubit") * c;
        }
        c
    }
}

fn ket0() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
}

fn ket_plus() -> CMatrix {
    CMatrix::from_element(2, 2, cplx(0.5, 0.0))
}

/// `|0⟩⟨0| ⊗ ρ ⊗ |+⟩⟨+|`.
pub fn encode(logical: &DensityMatrix) -> Result<DensityMatrix> {
    if logical.dim() != 2 {
        return Err(Error::InvalidState(format!("expected a single-qubit state, got dimension {}", logical.dim())));
    }
    validate(logical.matrix())?;
    Ok(DensityMatrix::new_unchecked(ket0().kronecker(logical.matrix()).kronecker(&ket_plus())))
}

/// Projector onto `Z1 = (-1)^{ν_z}`, `X3 = (-1)^{ν_x}`.
fn readout_projector(frame: FrameOutcome) -> CMatrix {
    let id = CMatrix::identity(8, 8);
    let z1 = PauliOp::parse("Z1", 3).expect("static").to_dense().expect("3 qubits");
    let x3 = PauliOp::parse("X3", 3).expect("static").to_dense().expect("3 qubits");
    let sz = if frame.nu_z == 0 { 1.0 } else { -1.0 };
    let sx = if frame.nu_x == 0 { 1.0 } else { -1.0 };
    let half = cplx(0.5, 0.0);
    let pz = (&id + z1 * cplx(sz, 0.0)) * half;
    let px = (&id + x3 * cplx(sx, 0.0)) * half;
    pz * px
}

/// One readout branch: its probability and the frame-corrected data-qubit state
/// (`None` when the branch has probability zero).
#[derive(Debug, Clone)]
pub struct DecodeBranch {
    pub frame: FrameOutcome,
    pub probability: f64,
    pub state: Option<CMatrix>,
}

/// Measures `Z1` and `X3`, applies the frame correction to qubit 2 and traces
/// out qubits 1 and 3, branch by branch.
pub fn decode_branches(rho: &DensityMatrix) -> Result<Vec<DecodeBranch>> {
    if rho.dim() != 8 {
        return Err(Error::InvalidState(format!("expected a three-qubit state, got dimension {}", rho.dim())));
    }
    let mut branches = Vec::with_capacity(4);
    for frame in FrameOutcome::all() {
        let proj = readout_projector(frame);
        let projected = &proj * rho.matrix() * &proj;
        let reduced = partial_trace_keep(&projected, 3, &[1]);
        let probability = (reduced[(0, 0)] + reduced[(1, 1)]).re;
        let c = frame.correction();
        let corrected = &c * reduced * c.adjoint();
        let state = (probability > 1e-300).then(|| corrected / cplx(probability, 0.0));
        branches.push(DecodeBranch { frame, probability, state });
    }
    Ok(branches)
}

/// Probability-weighted average of the decoded branches: a deterministic channel.
pub fn decode(rho: &DensityMatrix) -> Result<DensityMatrix> {
    validate(rho.matrix())?;
    let mut out = CMatrix::zeros(2, 2);
    for branch in decode_branches(rho)? {
        if let Some(state) = branch.state {
            out += state * cplx(branch.probability, 0.0);
        }
    }
    DensityMatrix::new(out)
}

/// Outcomes of one protection round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundOutcome {
    /// `Z1` and `Z2*Z3` outcomes.
    Z { nu_z: u8, nu_zz: u8 },
    /// `X3` and `X1*X2` outcomes.
    X { nu_x: u8, nu_xx: u8 },
}

fn basis_index(b1: u8, b2: u8, b3: u8) -> usize {
    ((b1 as usize) << 2) | ((b2 as usize) << 1) | b3 as usize
}

fn sign(bit: u8) -> f64 {
    if bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Logical basis vectors `|0̄⟩, |1̄⟩` after the given outcome history.
///
/// The history must alternate Z and X rounds starting with a Z round. An empty
/// history returns the encoded basis `|0⟩|μ⟩|+⟩`.
pub fn track_basis_states(history: &[RoundOutcome]) -> Result<[Vec<Complex64>; 2]> {
    for (k, round) in history.iter().enumerate() {
        let bits_ok = match round {
            RoundOutcome::Z { nu_z, nu_zz } => *nu_z < 2 && *nu_zz < 2,
            RoundOutcome::X { nu_x, nu_xx } => *nu_x < 2 && *nu_xx < 2,
        };
        let order_ok = matches!((k % 2, round), (0, RoundOutcome::Z { .. }) | (1, RoundOutcome::X { .. }));
        if !bits_ok || !order_ok {
            return Err(Error::InvalidArgument(format!("malformed outcome history at round {}", k + 1)));
        }
    }
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let build = |mu: u8| -> Vec<Complex64> {
        let mut psi = alloc::vec![ZERO; 8];
        match history.last() {
            None => {
                psi[basis_index(0, mu, 0)] = cplx(r, 0.0);
                psi[basis_index(0, mu, 1)] = cplx(r, 0.0);
            }
            Some(RoundOutcome::Z { nu_z, nu_zz }) => {
                psi[basis_index(*nu_z, mu ^ nu_z, mu ^ nu_z ^ nu_zz)] = ONE;
            }
            Some(RoundOutcome::X { nu_x, nu_xx }) => {
                let global = sign(mu * ((nu_x + nu_xx) & 1));
                // Bell pair (|μ⟩|0⟩ + (-1)^{ν_xx}|1⊕μ⟩|1⟩)/√2 on qubits 1, 2; |x, ν_x⟩ on qubit 3.
                for (b1, b2, amp12) in [(mu, 0u8, 1.0), (1 ^ mu, 1u8, sign(*nu_xx))] {
                    for (b3, amp3) in [(0u8, 1.0), (1u8, sign(*nu_x))] {
                        psi[basis_index(b1, b2, b3)] = cplx(global * amp12 * amp3 * 0.5, 0.0);
                    }
                }
            }
        }
        psi
    };
    Ok([build(0), build(1)])
}
