//! Dense density-matrix engine: noise Hamiltonians, measurement channels and
//! the interleaved measure/evolve protocol in both pictures.

mod channel;
mod evolution;
mod noise;
mod state;

pub use channel::{measurement_channel, pauli_sandwich, Channel};
pub use evolution::{
    evolve_states, heisenberg_channels, heisenberg_propagate, matrix_power, period_superoperator,
    projector_form, run_channels, run_protocol, MeasurementSchedule, REHERMITIZE_EVERY,
};
pub use noise::{build_hamiltonian, unitary_step, Hamiltonian, NoiseModel, RadialLaw};
pub use state::{validate, DensityMatrix, HERMITIAN_TOLERANCE, POSITIVITY_TOLERANCE, TRACE_TOLERANCE};
