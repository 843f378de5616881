//! The three-qubit Zeno memory: protocol definition, logical channel
//! extraction, error-probability sweeps and lifetime search.

mod channel;
mod code;
mod lifetime;

use alloc::format;
use alloc::vec::Vec;

pub use channel::{
    basis_inputs, ChannelEstimate, LogicalChannel, Ptm, CPTP_TOLERANCE, PAULI_DIAGONAL_TOLERANCE, PAULI_ORDER,
};
pub use code::{decode, decode_branches, encode, track_basis_states, DecodeBranch, FrameOutcome, RoundOutcome};
pub use lifetime::{compute_lifetime, find_lifetime, Lifetime, LifetimeSearch, SURFACE_CODE_THRESHOLD};

use crate::conditions::{check_conditions, EncodingSpec, ErrorSet};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::PauliOp;
use crate::simulator::{evolve_states, Channel, Hamiltonian, MeasurementSchedule, NoiseModel};

/// Encoding, measurement schedule, frequency and storage time of one memory run.
///
/// `frequency = 0` means an unprotected memory: the noise acts for `tau`
/// in a single step and no channel is applied.
#[derive(Debug, Clone)]
pub struct MemoryProtocol {
    encoding: EncodingSpec,
    schedule: MeasurementSchedule,
    channels: Vec<Channel>,
    frequency: f64,
    tau: f64,
}

impl MemoryProtocol {
    pub fn new(schedule: MeasurementSchedule, frequency: f64, tau: f64) -> Result<Self> {
        let encoding = EncodingSpec::three_qubit();
        if schedule.num_qubits() != 3 {
            return Err(Error::DimensionMismatch { left: 3, right: schedule.num_qubits() });
        }
        let report = check_conditions(&encoding, &schedule.operators(), &ErrorSet::one_local(3))?;
        if !report.all_hold() {
            return Err(Error::InvalidEncoding(format!("schedule fails the protection conditions:\n{report}")));
        }
        let channels = schedule.channels();
        let mut protocol = Self { encoding, schedule, channels, frequency: 0.0, tau: 0.0 };
        protocol.set_point(frequency, tau)?;
        Ok(protocol)
    }

    /// The standard schedule with measurement strength `zeta`.
    pub fn three_qubit(zeta: f64, frequency: f64, tau: f64) -> Result<Self> {
        Self::new(MeasurementSchedule::three_qubit(zeta)?, frequency, tau)
    }

    /// Copy of this protocol at another `(f, τ)` point, keeping any substituted channels.
    pub fn at(&self, frequency: f64, tau: f64) -> Result<Self> {
        let mut p = self.clone();
        p.set_point(frequency, tau)?;
        Ok(p)
    }

    fn set_point(&mut self, frequency: f64, tau: f64) -> Result<()> {
        if !(frequency.is_finite() && frequency >= 0.0) {
            return Err(Error::InvalidArgument(format!("frequency {frequency} must be finite and non-negative")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidArgument(format!("storage time {tau} must be finite and non-negative")));
        }
        self.frequency = frequency;
        self.tau = tau;
        Ok(())
    }

    /// Replaces the channel realizing the measurement of `op`.
    pub fn replace_measurement(&mut self, op: &PauliOp, channel: Channel) -> Result<()> {
        if channel.dim().is_some_and(|d| d != 8) {
            return Err(Error::DimensionMismatch { left: 8, right: channel.dim().unwrap_or(0) });
        }
        let index = self
            .schedule
            .operators()
            .iter()
            .position(|m| m.key() == op.key())
            .ok_or_else(|| Error::InvalidArgument(format!("{op} is not measured by this schedule")))?;
        self.channels[index] = channel;
        Ok(())
    }

    pub fn encoding(&self) -> &EncodingSpec {
        &self.encoding
    }

    pub fn schedule(&self) -> &MeasurementSchedule {
        &self.schedule
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of measure/evolve periods, `max(1, round(f τ))`.
    pub fn steps(&self) -> usize {
        if self.frequency == 0.0 {
            1
        } else {
            (libm::round(self.frequency * self.tau) as usize).max(1)
        }
    }

    /// Channels applied once per period, empty when unprotected.
    pub fn channels(&self) -> &[Channel] {
        if self.frequency == 0.0 {
            &[]
        } else {
            &self.channels
        }
    }

    /// Logical PTM for one fixed noise Hamiltonian.
    pub fn logical_ptm(&self, h: &Hamiltonian) -> Result<Ptm> {
        let inputs: Vec<CMatrix> =
            basis_inputs().iter().map(|rho| encode(rho).map(|e| e.into_matrix())).collect::<Result<_>>()?;
        let outputs = evolve_states(&inputs, h, self.channels(), self.tau, self.steps())?;
        let mut decoded = outputs.iter().map(|rho| decode(rho).map(|d| d.into_matrix()));
        let mut next = || decoded.next().expect("four outputs");
        Ok(Ptm::from_basis_outputs(&[next()?, next()?, next()?, next()?]))
    }
}

/// Seed of the `index`-th noise sample.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// The first `samples` noise Hamiltonians of the ensemble.
///
/// Reusing the same draws at every grid point keeps sweeps paired.
pub fn sample_hamiltonians(noise: &NoiseModel, samples: usize, seed: u64) -> Result<Vec<Hamiltonian>> {
    (0..samples).map(|i| noise.sample_hamiltonian(3, sample_seed(seed, i))).collect()
}

/// Sample-averaged logical channel over the given Hamiltonians.
pub fn estimate_channel(protocol: &MemoryProtocol, hamiltonians: &[Hamiltonian]) -> Result<ChannelEstimate> {
    if hamiltonians.is_empty() {
        return Err(Error::InvalidArgument("at least one noise sample is required".into()));
    }
    let ptms: Vec<Ptm> = hamiltonians.iter().map(|h| protocol.logical_ptm(h)).collect::<Result<_>>()?;
    ChannelEstimate::from_samples(&ptms)
}

/// Samples the noise ensemble and averages the resulting logical channels.
pub fn extract_channel(
    protocol: &MemoryProtocol,
    noise: &NoiseModel,
    samples: usize,
    seed: u64,
) -> Result<ChannelEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one noise sample is required".into()));
    }
    estimate_channel(protocol, &sample_hamiltonians(noise, samples, seed)?)
}

/// One row of an error-probability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub frequency: f64,
    pub tau: f64,
    pub estimate: ChannelEstimate,
}

/// Error probabilities over an `f × τ` grid, frequency-major.
pub fn sweep_error_probabilities(
    template: &MemoryProtocol,
    noise: &NoiseModel,
    frequencies: &[f64],
    times: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if frequencies.is_empty() || times.is_empty() {
        return Err(Error::InvalidArgument("frequency and time grids must be nonempty".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one noise sample is required".into()));
    }
    let hamiltonians = sample_hamiltonians(noise, samples, seed)?;
    let mut rows = Vec::with_capacity(frequencies.len() * times.len());
    for &f in frequencies {
        for &tau in times {
            let estimate = estimate_channel(&template.at(f, tau)?, &hamiltonians)?;
            rows.push(SweepRow { frequency: f, tau, estimate });
        }
    }
    Ok(rows)
}
