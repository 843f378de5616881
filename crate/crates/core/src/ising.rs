//! Parity projections realized by a two-qubit Ising pulse with a random coupling.
//!
//! A pulse `e^{-iJtσσ}` averaged over the coupling density `p(J)` acts as
//! `(1 - p_σσ)• + p_σσ σσ•σσ` once the pulse time cancels the cross term
//! `∫ p(J) sin(Jt) cos(Jt) dJ`. Applying that pulse with probability
//! `1 / (2 p_σσ)` reproduces the unread parity measurement `½• + ½σσ•σσ`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{cplx, CMatrix, I};
use crate::pauli::{Pauli, PauliOp};
use crate::quadrature::{bisect, composite_rule, gauss_legendre, integrate};
use crate::simulator::Channel;

/// Absolute tolerance of the scalar integrals.
pub const INTEGRATION_TOLERANCE: f64 = 1e-12;

/// Gaussian densities are cut off this many widths from the mean.
pub const GAUSSIAN_CUTOFF: f64 = 12.0;

/// Cross terms below this are treated as cancelled.
pub const CROSS_TERM_TOLERANCE: f64 = 1e-9;

/// A finite, normalized table of couplings and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    entries: Vec<(f64, f64)>,
}

impl Table {
    /// Normalizes the weights; rejects negative or non-finite entries and an all-zero table.
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.iter().any(|&(j, w)| !j.is_finite() || !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidArgument("coupling table entries must be finite with nonnegative weights".into()));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("coupling table has zero total weight".into()));
        }
        Ok(Self { entries: entries.into_iter().map(|(j, w)| (j, w / total)).collect() })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }
}

/// Probability density of the Ising coupling `J`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingDistribution {
    Delta { j0: f64 },
    Gaussian { mean: f64, width: f64 },
    Uniform { low: f64, high: f64 },
    Tabulated(Table),
}

impl CouplingDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Delta { j0 } => j0.is_finite(),
            Self::Gaussian { mean, width } => mean.is_finite() && width.is_finite() && *width > 0.0,
            Self::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            Self::Tabulated(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid coupling distribution {self:?}")))
        }
    }

    /// Support used for integration (Gaussians are truncated).
    fn support(&self) -> (f64, f64) {
        match self {
            Self::Delta { j0 } => (*j0, *j0),
            Self::Gaussian { mean, width } => (mean - GAUSSIAN_CUTOFF * width, mean + GAUSSIAN_CUTOFF * width),
            Self::Uniform { low, high } => (*low, *high),
            Self::Tabulated(t) => t.entries.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(j, _)| {
                (lo.min(j), hi.max(j))
            }),
        }
    }

    /// Largest `|J|` with appreciable weight.
    pub fn max_abs_coupling(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    fn gaussian_density(mean: f64, width: f64) -> impl Fn(f64) -> f64 {
        move |j| {
            let u = (j - mean) / width;
            libm::exp(-0.5 * u * u)
        }
    }

    /// `∫ p(J) g(J) dJ`.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        self.validate()?;
        match self {
            Self::Delta { j0 } => Ok(g(*j0)),
            Self::Tabulated(t) => Ok(t.entries.iter().map(|&(j, w)| w * g(j)).sum()),
            Self::Uniform { low, high } => {
                Ok(integrate(&g, *low, *high, INTEGRATION_TOLERANCE * (high - low))? / (high - low))
            }
            Self::Gaussian { mean, width } => {
                let (lo, hi) = self.support();
                let rho = Self::gaussian_density(*mean, *width);
                let norm = integrate(&rho, lo, hi, INTEGRATION_TOLERANCE)?;
                let tol = INTEGRATION_TOLERANCE * norm;
                Ok(integrate(|j| rho(j) * g(j), lo, hi, tol)? / norm)
            }
        }
    }

    /// `∫ p(J) sin(Jt) cos(Jt) dJ`.
    pub fn cross_term(&self, t: f64) -> Result<f64> {
        self.expectation(|j| 0.5 * libm::sin(2.0 * j * t))
    }

    /// `p_σσ(t) = ∫ p(J) sin²(Jt) dJ`.
    pub fn p_sigma_sigma(&self, t: f64) -> Result<f64> {
        self.expectation(|j| {
            let s = libm::sin(j * t);
            s * s
        })
    }

    /// Discrete couplings and weights (summing to one) used to build the pulse channel.
    pub fn quadrature_nodes(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let nodes = match self {
            Self::Delta { j0 } => alloc::vec![(*j0, 1.0)],
            Self::Tabulated(t) => t.entries.clone(),
            Self::Uniform { low, high } => composite_rule(*low, *high, 8, &gauss_legendre(16)),
            Self::Gaussian { mean, width } => {
                let (lo, hi) = self.support();
                let rho = Self::gaussian_density(*mean, *width);
                composite_rule(lo, hi, 24, &gauss_legendre(16)).into_iter().map(|(j, w)| (j, w * rho(j))).collect()
            }
        };
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        Ok(nodes.into_iter().map(|(j, w)| (j, w / total)).collect())
    }
}

/// Pulse time and the resulting mixture weights for one distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingRealization {
    pub t: f64,
    pub p_sigma_sigma: f64,
    /// Probability `1 / (2 p_σσ)` of applying the pulse.
    pub apply_probability: f64,
    /// `|∫ p(J) sin(Jt) cos(Jt) dJ|` at the chosen `t`.
    pub residual_cross_term: f64,
}

fn scan_points(dist: &CouplingDistribution, lo: f64, hi: f64) -> usize {
    // Several samples per half-period of sin(2Jt).
    let per_unit = 16.0 * dist.max_abs_coupling().max(1e-3) / core::f64::consts::PI;
    (((hi - lo) * per_unit) as usize).clamp(2048, 1 << 20)
}

/// Finds a pulse time in `window` that cancels the cross term with `p_σσ > ½`.
///
/// Among all roots in the window the one with the largest `p_σσ` wins; near-ties
/// go to the shorter pulse.
pub fn find_pulse_time(dist: &CouplingDistribution, window: (f64, f64)) -> Result<IsingRealization> {
    dist.validate()?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidArgument(format!("invalid pulse-time window ({lo}, {hi})")));
    }
    let points = scan_points(dist, lo, hi);
    let grid: Vec<f64> = (0..=points).map(|k| lo + (hi - lo) * k as f64 / points as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&t| dist.cross_term(t)).collect::<Result<_>>()?;

    let mut roots = Vec::new();
    for k in 0..points {
        let (a, b) = (values[k], values[k + 1]);
        if a == 0.0 {
            roots.push(grid[k]);
        } else if b != 0.0 && a.signum() != b.signum() {
            roots.push(bisect(|t| dist.cross_term(t), grid[k], grid[k + 1])?);
        }
    }
    if values[points] == 0.0 {
        roots.push(grid[points]);
    }

    let mut best: Option<(f64, f64)> = None;
    for t in roots {
        let p = dist.p_sigma_sigma(t)?;
        let better = match best {
            None => true,
            Some((_, bp)) => p > bp + 1e-12,
        };
        if better {
            best = Some((t, p));
        }
    }
    match best {
        Some((t, p)) if p > 0.5 => {
            let residual = dist.cross_term(t)?.abs();
            if residual > CROSS_TERM_TOLERANCE {
                return Err(Error::InvalidState(format!("cross term {residual:.3e} left at t = {t}")));
            }
            Ok(IsingRealization { t, p_sigma_sigma: p, apply_probability: 1.0 / (2.0 * p), residual_cross_term: residual })
        }
        Some((t, p)) => Err(Error::NoPulseTime { best_t: t, best_p: p }),
        None => {
            let k = (0..=points).min_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs())).unwrap_or(0);
            Err(Error::NoPulseTime { best_t: grid[k], best_p: dist.p_sigma_sigma(grid[k])? })
        }
    }
}

fn check_pair(sigma_pair: &PauliOp) -> Result<()> {
    let letters: Vec<Pauli> = sigma_pair.support().iter().map(|&q| sigma_pair.letter(q)).collect();
    let same = letters.len() == 2 && letters[0] == letters[1] && matches!(letters[0], Pauli::X | Pauli::Z);
    if !same || sigma_pair.phase() != 0 {
        return Err(Error::InvalidArgument(format!("{sigma_pair} is not an XX or ZZ pair")));
    }
    Ok(())
}

/// `cos(θ) I - i sin(θ) S` for a Pauli `S` with `S² = I`.
fn pauli_rotation(sigma: &CMatrix, theta: f64) -> CMatrix {
    let dim = sigma.nrows();
    CMatrix::identity(dim, dim) * cplx(libm::cos(theta), 0.0) - sigma * (I * libm::sin(theta))
}

/// `∫ dJ p(J) e^{-iJtσσ} • e^{iJtσσ}` as a mixed-unitary channel over the quadrature nodes.
pub fn noisy_ising_channel(dist: &CouplingDistribution, t: f64, sigma_pair: &PauliOp) -> Result<Channel> {
    check_pair(sigma_pair)?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("pulse time {t} is not finite")));
    }
    let sigma = sigma_pair.to_dense()?;
    let terms = dist.quadrature_nodes()?.into_iter().map(|(j, w)| (w, pauli_rotation(&sigma, j * t))).collect();
    Channel::mixed_unitary(terms)
}

/// The pulse applied with probability `1 / (2 p_σσ)`, else nothing.
pub fn realize_parity_projection_at(
    dist: &CouplingDistribution,
    realization: &IsingRealization,
    sigma_pair: &PauliOp,
) -> Result<Channel> {
    check_pair(sigma_pair)?;
    let q = realization.apply_probability;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("apply probability {q} outside [0, 1]")));
    }
    let sigma = sigma_pair.to_dense()?;
    let dim = sigma.nrows();
    let mut terms = alloc::vec![(1.0 - q, CMatrix::identity(dim, dim))];
    for (j, w) in dist.quadrature_nodes()? {
        terms.push((q * w, pauli_rotation(&sigma, j * realization.t)));
    }
    Channel::mixed_unitary(terms)
}

/// Finds the pulse time in `window` and returns the realized parity projection.
pub fn realize_parity_projection(
    dist: &CouplingDistribution,
    sigma_pair: &PauliOp,
    window: (f64, f64),
) -> Result<(IsingRealization, Channel)> {
    let realization = find_pulse_time(dist, window)?;
    let channel = realize_parity_projection_at(dist, &realization, sigma_pair)?;
    Ok((realization, channel))
}
