use alloc::format;

use super::{estimate_channel, sample_hamiltonians, MemoryProtocol};
use crate::error::{Error, Result};
use crate::simulator::{MeasurementSchedule, NoiseModel};

/// Error threshold of the surface code for `max{p_X + p_Y, p_Z + p_Y}`.
pub const SURFACE_CODE_THRESHOLD: f64 = 0.104;

/// Bracketing and bisection parameters of the lifetime search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeSearch {
    /// First storage time probed by the doubling scan.
    pub tau_start: f64,
    /// Largest storage time probed; reaching it without a crossing ends the search.
    pub tau_cap: f64,
    /// Bisection stops once the bracket is narrower than `rel_tol` times its upper end.
    pub rel_tol: f64,
    pub threshold: f64,
}

impl Default for LifetimeSearch {
    fn default() -> Self {
        Self { tau_start: 0.05, tau_cap: 1.0e4, rel_tol: 1.0e-3, threshold: SURFACE_CODE_THRESHOLD }
    }
}

impl LifetimeSearch {
    fn validate(&self) -> Result<()> {
        let ok = self.tau_start > 0.0
            && self.tau_cap.is_finite()
            && self.tau_start <= self.tau_cap
            && self.rel_tol > 0.0
            && self.rel_tol < 1.0
            && self.threshold > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid lifetime search parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifetime {
    /// Largest probed storage time whose metric stays at or below the threshold.
    pub tau: f64,
    /// `false` when the cap was reached without crossing; `tau` is then the cap.
    pub crossed: bool,
    pub evaluations: usize,
}

/// Finds where `metric(τ)` first exceeds the threshold: a doubling scan
/// brackets the crossing, then bisection narrows it.
pub fn find_lifetime(search: &LifetimeSearch, mut metric: impl FnMut(f64) -> Result<f64>) -> Result<Lifetime> {
    search.validate()?;
    let mut evaluations = 0;
    let mut exceeds = |tau: f64| -> Result<bool> {
        evaluations += 1;
        let m = metric(tau)?;
        if m.is_nan() {
            return Err(Error::InvalidState(format!("metric is NaN at tau = {tau}")));
        }
        Ok(m > search.threshold)
    };

    let mut lo = 0.0;
    let mut tau = search.tau_start;
    let mut hi = loop {
        if exceeds(tau)? {
            break tau;
        }
        lo = tau;
        if tau >= search.tau_cap {
            return Ok(Lifetime { tau: search.tau_cap, crossed: false, evaluations });
        }
        tau = (2.0 * tau).min(search.tau_cap);
    };
    while hi - lo > search.rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Lifetime { tau: lo, crossed: true, evaluations })
}

/// Lifetime of the memory at frequency `f` with measurement strength `zeta`,
/// judged on the sample-averaged channel with the same noise draws at every τ.
pub fn compute_lifetime(
    template: &MemoryProtocol,
    noise: &NoiseModel,
    zeta: f64,
    frequency: f64,
    samples: usize,
    seed: u64,
    search: &LifetimeSearch,
) -> Result<Lifetime> {
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::InvalidArgument(format!("zeta = {zeta} outside [0, 1)")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one noise sample is required".into()));
    }
    let schedule = MeasurementSchedule::new(3, template.schedule().rounds().to_vec(), zeta)?;
    let protocol = MemoryProtocol::new(schedule, frequency, 0.0)?;
    let hamiltonians = sample_hamiltonians(noise, samples, seed)?;
    find_lifetime(search, |tau| {
        Ok(estimate_channel(&protocol.at(frequency, tau)?, &hamiltonians)?.channel.threshold_metric())
    })
}
