//! Experiment runner for the operator Zeno simulator.
//!
//! `zeno run <mode> <config>` reads a TOML experiment file, runs it on a
//! worker pool and writes CSV and text reports. Modes:
//!
//! - `check`: protection conditions for an encoding, measurement set and error set
//! - `fig2`: logical error probabilities of the three-qubit memory over an `f × τ` grid
//! - `fig3`: memory lifetime against the surface-code threshold
//! - `ising`: parity checks realized by noisy Ising pulses
//! - `custom`: conditions plus logical-operator drift for any encoding

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::Mode;
pub use run::{run, Options, Outcome};
