//! Parallel drivers over `(grid point, noise sample)` tasks.
//!
//! Tasks are collected in index order and reduced sequentially, so results do
//! not depend on how many workers ran them.

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;

use zeno_core::linalg::{max_abs_diff, mean_and_stderr, CMatrix};
use zeno_core::memory::{
    find_lifetime, sample_seed, ChannelEstimate, Lifetime, LifetimeSearch, MemoryProtocol, Ptm, SweepRow,
};
use zeno_core::simulator::{heisenberg_channels, Channel, Hamiltonian, MeasurementSchedule, NoiseModel};

pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = workers {
        ensure!(k >= 1, "--workers must be at least 1");
        builder = builder.num_threads(k);
    }
    builder.build().context("starting worker pool")
}

pub fn sample_hamiltonians(noise: &NoiseModel, n: usize, samples: usize, seed: u64) -> Result<Vec<Hamiltonian>> {
    (0..samples)
        .into_par_iter()
        .map(|i| noise.sample_hamiltonian(n, sample_seed(seed, i)).map_err(Into::into))
        .collect()
}

/// Sample-averaged logical channel at each `(f, τ)`, frequency-major.
pub fn memory_sweep(
    template: &MemoryProtocol,
    hamiltonians: &[Hamiltonian],
    frequencies: &[f64],
    times: &[f64],
) -> Result<Vec<SweepRow>> {
    ensure!(!hamiltonians.is_empty(), "at least one noise sample is required");
    let points: Vec<(f64, f64)> = frequencies.iter().flat_map(|&f| times.iter().map(move |&t| (f, t))).collect();
    let protocols: Vec<MemoryProtocol> = points.iter().map(|&(f, t)| template.at(f, t)).collect::<Result<_, _>>()?;
    let s = hamiltonians.len();
    let ptms: Vec<Ptm> = (0..points.len() * s)
        .into_par_iter()
        .map(|task| protocols[task / s].logical_ptm(&hamiltonians[task % s]))
        .collect::<Result<_, _>>()?;
    points
        .iter()
        .zip(ptms.chunks(s))
        .map(|(&(frequency, tau), chunk)| {
            let estimate = ChannelEstimate::from_samples(chunk)
                .with_context(|| format!("logical channel at f = {frequency}, tau = {tau}"))?;
            Ok(SweepRow { frequency, tau, estimate })
        })
        .collect()
}

pub fn estimate_parallel(protocol: &MemoryProtocol, hamiltonians: &[Hamiltonian]) -> Result<ChannelEstimate> {
    Ok(memory_sweep(protocol, hamiltonians, &[protocol.frequency()], &[protocol.tau()])?[0].estimate)
}

/// Lifetime at one `(ζ, f)`, with the samples of each probe run in parallel.
pub fn lifetime(
    template: &MemoryProtocol,
    hamiltonians: &[Hamiltonian],
    zeta: f64,
    frequency: f64,
    search: &LifetimeSearch,
) -> Result<Lifetime> {
    let schedule = MeasurementSchedule::new(3, template.schedule().rounds().to_vec(), zeta)?;
    let protocol = MemoryProtocol::new(schedule, frequency, 0.0)?;
    let life = find_lifetime(search, |tau| {
        let est = estimate_parallel(&protocol.at(frequency, tau)?, hamiltonians)
            .map_err(|e| zeno_core::Error::InvalidState(format!("{e:#}")))?;
        Ok(est.channel.threshold_metric())
    })?;
    Ok(life)
}

/// Mean and standard error of `max |A(τ) - A|` for one logical operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub frequency: f64,
    pub tau: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Heisenberg-picture drift of `op` over an `f × τ` grid, frequency-major.
///
/// `f = 0` evolves freely for `τ` in one step, as in the memory sweeps.
pub fn logical_drift(
    op: &CMatrix,
    channels: &[Channel],
    hamiltonians: &[Hamiltonian],
    frequencies: &[f64],
    times: &[f64],
) -> Result<Vec<Drift>> {
    ensure!(!hamiltonians.is_empty(), "at least one noise sample is required");
    let points: Vec<(f64, f64)> = frequencies.iter().flat_map(|&f| times.iter().map(move |&t| (f, t))).collect();
    let s = hamiltonians.len();
    let values: Vec<f64> = (0..points.len() * s)
        .into_par_iter()
        .map(|task| {
            let (f, tau) = points[task / s];
            let (chs, steps) = if f == 0.0 { (&[][..], 1) } else { (channels, ((f * tau).round() as usize).max(1)) };
            let evolved = heisenberg_channels(op, &hamiltonians[task % s], chs, tau, steps)?;
            Ok(max_abs_diff(&evolved, op))
        })
        .collect::<Result<_>>()?;
    Ok(points
        .iter()
        .zip(values.chunks(s))
        .map(|(&(frequency, tau), chunk)| {
            let (mean, stderr) = mean_and_stderr(chunk);
            Drift { frequency, tau, mean, stderr }
        })
        .collect())
}
