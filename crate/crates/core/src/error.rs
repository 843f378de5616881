use alloc::string::String;

use crate::pauli::PauliOp;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{qubits} qubits exceeds the limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },

    #[error("cannot parse Pauli string {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("group closure would exceed {cap} elements")]
    ClosureTooLarge { cap: usize },

    #[error("operator {0} is not Hermitian")]
    NotHermitian(PauliOp),

    #[error("{operator} does not commute with measured operator {measured}")]
    NoncommutingObservable { operator: PauliOp, measured: PauliOp },

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid error set: {0}")]
    InvalidErrorSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),

    #[error("eigendecomposition did not converge")]
    Eigendecomposition,

    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("no pulse time with p_sigma_sigma > 1/2 in window; best candidate t = {best_t} (p = {best_p})")]
    NoPulseTime { best_t: f64, best_p: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
