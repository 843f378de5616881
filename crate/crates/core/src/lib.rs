//! Operator quantum Zeno effect toolkit.
//!
//! * [`pauli`]: symplectic Pauli algebra and group closures.
//! * [`conditions`]: symbolic protection conditions for an encoding under unread measurements.
//! * [`simulator`]: density-matrix evolution under interleaved noise and measurement channels.
//! * [`memory`]: the three-qubit Zeno memory, its logical error channel and lifetime.
//! * [`ising`]: parity projections realized with a noisy Ising coupling.
//! * [`quadrature`]: Gauss–Legendre rules and bracketed root finding.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod conditions;
pub mod error;
pub mod ising;
pub mod linalg;
pub mod memory;
pub mod pauli;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
