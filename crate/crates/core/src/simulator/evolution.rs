use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::channel::{measurement_channel, Channel};
use super::noise::Hamiltonian;
use super::state::{validate, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{hermitize, CMatrix, ONE, ZERO};
use crate::pauli::PauliOp;

/// Steps between re-Hermitizations of the evolving state.
pub const REHERMITIZE_EVERY: usize = 1000;

/// Ordered rounds of simultaneously measured Pauli operators sharing one weakness `zeta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSchedule {
    n: usize,
    rounds: Vec<Vec<PauliOp>>,
    zeta: f64,
}

impl MeasurementSchedule {
    pub fn new(n: usize, rounds: Vec<Vec<PauliOp>>, zeta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::InvalidArgument(format!("zeta = {zeta} outside [0, 1]")));
        }
        for round in &rounds {
            for (i, a) in round.iter().enumerate() {
                if a.num_qubits() != n {
                    return Err(Error::DimensionMismatch { left: n, right: a.num_qubits() });
                }
                if !a.is_hermitian() {
                    return Err(Error::NotHermitian(*a));
                }
                if let Some(b) = round[i + 1..].iter().find(|b| !a.commutes_unchecked(b)) {
                    return Err(Error::InvalidArgument(format!("{a} and {b} share a round but anticommute")));
                }
            }
        }
        Ok(Self { n, rounds, zeta })
    }

    /// No measurements at all.
    pub fn empty(n: usize) -> Self {
        Self { n, rounds: Vec::new(), zeta: 1.0 }
    }

    /// Rounds `{Z1, Z2*Z3}` then `{X3, X1*X2}`.
    pub fn three_qubit(zeta: f64) -> Result<Self> {
        let ops = crate::conditions::three_qubit_measurements();
        Self::new(3, alloc::vec![alloc::vec![ops[0], ops[1]], alloc::vec![ops[2], ops[3]]], zeta)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> &[Vec<PauliOp>] {
        &self.rounds
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Measured operators in application order.
    pub fn operators(&self) -> Vec<PauliOp> {
        self.rounds.iter().flatten().copied().collect()
    }

    /// One channel per measured operator, in application order.
    pub fn channels(&self) -> Vec<Channel> {
        self.operators()
            .iter()
            .map(|op| measurement_channel(op, self.zeta).expect("validated at construction"))
            .collect()
    }
}

fn check_protocol(dim: usize, h: &Hamiltonian, channels: &[Channel], tau: f64, steps: usize) -> Result<f64> {
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { left: dim, right: h.dim() });
    }
    if let Some(bad) = channels.iter().filter_map(|c| c.dim()).find(|&d| d != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: bad });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("storage time {tau} must be finite and >= 0")));
    }
    Ok(tau / steps as f64)
}

/// Applies `U(dt) · P` once, in place.
struct Stepper {
    unitary: CMatrix,
    unitary_adj: CMatrix,
    scratch: CMatrix,
    product: CMatrix,
}

impl Stepper {
    fn new(h: &Hamiltonian, dt: f64) -> Self {
        let unitary = h.unitary(dt);
        let unitary_adj = unitary.adjoint();
        let dim = h.dim();
        Self { unitary, unitary_adj, scratch: CMatrix::zeros(dim, dim), product: CMatrix::zeros(dim, dim) }
    }

    fn forward(&mut self, rho: &mut CMatrix, channels: &[Channel]) {
        for ch in channels {
            ch.apply_in_place(rho, &mut self.scratch);
        }
        self.unitary.mul_to(rho, &mut self.product);
        self.product.mul_to(&self.unitary_adj, rho);
    }

    /// `A <- P†(U† A U)`, with `P† = P1† ... PK†` (the last channel acts first).
    fn backward(&mut self, op: &mut CMatrix, channels: &[Channel]) {
        self.unitary_adj.mul_to(op, &mut self.product);
        self.product.mul_to(&self.unitary, op);
        for ch in channels.iter().rev() {
            match ch {
                Channel::PauliMeasurement { .. } => ch.apply_in_place(op, &mut self.scratch),
                Channel::Kraus(_) => *op = ch.apply_adjoint(op),
            }
        }
    }
}

/// `ρ(τ) = [U(τ/N) P]^N ρ(0)` with `P` the schedule's channels in order.
pub fn run_protocol(
    rho0: &DensityMatrix,
    h: &Hamiltonian,
    sched: &MeasurementSchedule,
    tau: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if sched.num_qubits() != rho0.num_qubits() {
        return Err(Error::DimensionMismatch { left: rho0.num_qubits(), right: sched.num_qubits() });
    }
    run_channels(rho0, h, &sched.channels(), tau, steps)
}

/// [`run_protocol`] with an arbitrary channel sequence standing in for `P`.
pub fn run_channels(
    rho0: &DensityMatrix,
    h: &Hamiltonian,
    channels: &[Channel],
    tau: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    let dt = check_protocol(rho0.dim(), h, channels, tau, steps)?;
    let mut stepper = Stepper::new(h, dt);
    let mut rho = rho0.matrix().clone();
    for step in 1..=steps {
        stepper.forward(&mut rho, channels);
        if step % REHERMITIZE_EVERY == 0 {
            hermitize(&mut rho);
        }
    }
    validate(&rho)?;
    Ok(DensityMatrix::new_unchecked(rho))
}

/// Heisenberg picture: `A(τ) = [P† U(-τ/N)]^N A`.
pub fn heisenberg_propagate(
    op: &CMatrix,
    h: &Hamiltonian,
    sched: &MeasurementSchedule,
    tau: f64,
    steps: usize,
) -> Result<CMatrix> {
    heisenberg_channels(op, h, &sched.channels(), tau, steps)
}

pub fn heisenberg_channels(
    op: &CMatrix,
    h: &Hamiltonian,
    channels: &[Channel],
    tau: f64,
    steps: usize,
) -> Result<CMatrix> {
    if !op.is_square() {
        return Err(Error::InvalidArgument("observable must be square".into()));
    }
    let dt = check_protocol(op.nrows(), h, channels, tau, steps)?;
    let mut stepper = Stepper::new(h, dt);
    let mut a = op.clone();
    for _ in 0..steps {
        stepper.backward(&mut a, channels);
    }
    Ok(a)
}

/// Liouville matrix of one period `U(dt) P`, acting on column-major `vec(ρ)`.
pub fn period_superoperator(h: &Hamiltonian, channels: &[Channel], dt: f64) -> CMatrix {
    let dim = h.dim();
    let mut stepper = Stepper::new(h, dt);
    let mut sup = CMatrix::zeros(dim * dim, dim * dim);
    let mut unit = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            unit.fill(ZERO);
            unit[(row, col)] = ONE;
            stepper.forward(&mut unit, channels);
            let j = row + col * dim;
            sup.column_mut(j).copy_from_slice(unit.as_slice());
        }
    }
    sup
}

/// `m^k` by repeated squaring.
pub fn matrix_power(m: &CMatrix, mut k: usize) -> CMatrix {
    let dim = m.nrows();
    let mut result = CMatrix::identity(dim, dim);
    let mut base = m.clone();
    let mut tmp = CMatrix::zeros(dim, dim);
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            if first {
                result.copy_from(&base);
                first = false;
            } else {
                result.mul_to(&base, &mut tmp);
                core::mem::swap(&mut result, &mut tmp);
            }
        }
        k >>= 1;
        if k > 0 {
            base.mul_to(&base, &mut tmp);
            core::mem::swap(&mut base, &mut tmp);
        }
    }
    result
}

/// Rough complex multiply-add counts for the two evaluation strategies.
fn prefer_superoperator(dim: usize, inputs: usize, steps: usize) -> bool {
    let d = dim as f64;
    let step_cost = 2.0 * d * d * d + 8.0 * d * d;
    let direct = step_cost * (inputs * steps) as f64;
    let squarings = 2.0 * (usize::BITS - steps.leading_zeros()) as f64;
    let d2 = d * d;
    let power = d2 * step_cost + squarings * d2 * d2 * d2 + inputs as f64 * d2 * d2;
    power < direct
}

/// Evolves several initial states through the same protocol.
///
/// Long runs are evaluated as `S^N vec(ρ)` with `S` the one-period Liouville
/// matrix; short runs step each state directly. Both give the map of [`run_channels`].
pub fn evolve_states(
    inputs: &[CMatrix],
    h: &Hamiltonian,
    channels: &[Channel],
    tau: f64,
    steps: usize,
) -> Result<Vec<DensityMatrix>> {
    let dim = h.dim();
    let dt = check_protocol(dim, h, channels, tau, steps)?;
    let mut outputs = Vec::with_capacity(inputs.len());
    if prefer_superoperator(dim, inputs.len(), steps) {
        let total = matrix_power(&period_superoperator(h, channels, dt), steps);
        for rho in inputs {
            let v = &total * CMatrix::from_column_slice(dim * dim, 1, rho.as_slice());
            let mut out = CMatrix::from_column_slice(dim, dim, v.as_slice());
            hermitize(&mut out);
            // Repeated squaring leaves a trace drift of order N·ε; the exact map preserves the trace.
            let tr = crate::linalg::trace(&out);
            out /= tr;
            validate(&out)?;
            outputs.push(DensityMatrix::new_unchecked(out));
        }
    } else {
        for rho in inputs {
            validate(rho)?;
            outputs.push(run_channels(&DensityMatrix::new_unchecked(rho.clone()), h, channels, tau, steps)?);
        }
    }
    Ok(outputs)
}

/// `(1+ζ)/2 ρ + (1-ζ)/2 σρσ` written out from projectors for testing and reference.
pub fn projector_form(op: &PauliOp, rho: &CMatrix) -> Result<CMatrix> {
    let sigma = op.to_dense()?;
    let dim = sigma.nrows();
    let id = CMatrix::identity(dim, dim);
    let half = Complex64::new(0.5, 0.0);
    let plus = (&id + &sigma) * half;
    let minus = (&id - &sigma) * half;
    Ok(&plus * rho * &plus + &minus * rho * &minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, max_abs_diff};

    #[test]
    fn schedule_rejects_anticommuting_round() {
        let ops = crate::conditions::three_qubit_measurements();
        assert!(MeasurementSchedule::new(3, alloc::vec![alloc::vec![ops[0], ops[3]]], 0.0).is_err());
        assert!(MeasurementSchedule::three_qubit(1.2).is_err());
        assert_eq!(MeasurementSchedule::three_qubit(0.0).unwrap().channels().len(), 4);
    }

    #[test]
    fn single_step_without_measurements_is_unitary_conjugation() {
        let h = Hamiltonian::from_terms(1, &[(PauliOp::parse("X1", 1).unwrap(), 0.8)]).unwrap();
        let rho0 = DensityMatrix::from_pure(&[cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        let out = run_protocol(&rho0, &h, &MeasurementSchedule::empty(1), 0.9, 1).unwrap();
        let u = h.unitary(0.9);
        let expected = &u * rho0.matrix() * u.adjoint();
        assert!(max_abs_diff(out.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn power_by_squaring() {
        let m = CMatrix::from_row_slice(2, 2, &[cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)]);
        let p = matrix_power(&m, 37);
        assert_eq!(p[(0, 1)], cplx(37.0, 0.0));
        assert_eq!(matrix_power(&m, 0), CMatrix::identity(2, 2));
    }

    #[test]
    fn invalid_protocol_arguments() {
        let h = Hamiltonian::zero(1);
        let rho0 = DensityMatrix::maximally_mixed(1);
        let sched = MeasurementSchedule::empty(1);
        assert!(run_protocol(&rho0, &h, &sched, 1.0, 0).is_err());
        assert!(run_protocol(&rho0, &h, &sched, -1.0, 1).is_err());
        assert!(run_protocol(&rho0, &Hamiltonian::zero(2), &sched, 1.0, 1).is_err());
    }
}
