//! Experiment configuration files (TOML).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use zeno_core::conditions::{EncodingSpec, ErrorSet};
use zeno_core::ising::{CouplingDistribution, Table};
use zeno_core::memory::LifetimeSearch;
use zeno_core::pauli::PauliOp;
use zeno_core::simulator::{MeasurementSchedule, NoiseModel, RadialLaw};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Check,
    Fig2,
    Fig3,
    Ising,
    Custom,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Check => "check",
            Mode::Fig2 => "fig2",
            Mode::Fig3 => "fig3",
            Mode::Ising => "ising",
            Mode::Custom => "custom",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "check" => Mode::Check,
            "fig2" => Mode::Fig2,
            "fig3" => Mode::Fig3,
            "ising" => Mode::Ising,
            "custom" => Mode::Custom,
            other => bail!("unknown mode `{other}`"),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// When present, must agree with the mode given on the command line.
    pub mode: Option<Mode>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub sweep: Option<SweepConfig>,
    pub lifetime: Option<LifetimeConfig>,
    pub ising: Option<IsingConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Encoding, measurement rounds and error set, as Pauli strings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    pub logical_z: Vec<String>,
    pub logical_x: Vec<String>,
    pub rounds: Vec<Vec<String>>,
    /// Defaults to the identity plus all one-local Paulis.
    pub errors: Option<Vec<String>>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            n: 3,
            logical_z: s(&["Z1*Z2"]),
            logical_x: s(&["X2*X3"]),
            rounds: vec![s(&["Z1", "Z2*Z3"]), s(&["X3", "X1*X2"])],
            errors: None,
        }
    }
}

pub fn parse_ops(n: usize, field: &str, strings: &[String]) -> Result<Vec<PauliOp>> {
    strings
        .iter()
        .enumerate()
        .map(|(k, s)| PauliOp::parse(s, n).with_context(|| format!("{field}[{k}] = {s:?}")))
        .collect()
}

impl SystemConfig {
    pub fn encoding(&self) -> Result<EncodingSpec> {
        let z = parse_ops(self.n, "system.logical_z", &self.logical_z)?;
        let x = parse_ops(self.n, "system.logical_x", &self.logical_x)?;
        EncodingSpec::new(self.n, z, x).context("system: invalid logical operators")
    }

    pub fn round_ops(&self) -> Result<Vec<Vec<PauliOp>>> {
        self.rounds
            .iter()
            .enumerate()
            .map(|(k, round)| parse_ops(self.n, &format!("system.rounds[{k}]"), round))
            .collect()
    }

    pub fn measured(&self) -> Result<Vec<PauliOp>> {
        Ok(self.round_ops()?.into_iter().flatten().collect())
    }

    pub fn schedule(&self, zeta: f64) -> Result<MeasurementSchedule> {
        MeasurementSchedule::new(self.n, self.round_ops()?, zeta).context("system.rounds")
    }

    pub fn error_set(&self) -> Result<ErrorSet> {
        match &self.errors {
            None => Ok(ErrorSet::one_local(self.n)),
            Some(list) => {
                let ops = parse_ops(self.n, "system.errors", list)?;
                ErrorSet::from_ops(self.n, &ops).context("system.errors")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radial {
    #[default]
    Ball,
    Radius,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub op: String,
    pub coeff: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    /// One random vector per qubit with `‖a_i‖ ≤ magnitude`.
    Isotropic {
        magnitude: f64,
        #[serde(default)]
        radial: Radial,
    },
    Explicit { terms: Vec<TermConfig> },
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::Isotropic { magnitude: 1.0, radial: Radial::Ball }
    }
}

impl NoiseConfig {
    pub fn model(&self, n: usize) -> Result<NoiseModel> {
        match self {
            NoiseConfig::Isotropic { magnitude, radial } => {
                ensure!(magnitude.is_finite() && *magnitude >= 0.0, "noise.magnitude must be finite and >= 0");
                let radial = match radial {
                    Radial::Ball => RadialLaw::UniformBall,
                    Radial::Radius => RadialLaw::UniformRadius,
                };
                Ok(NoiseModel::OneLocalRandom { magnitude: *magnitude, radial })
            }
            NoiseConfig::Explicit { terms } => {
                let parsed = terms
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        ensure!(t.coeff.is_finite(), "noise.terms[{k}].coeff is not finite");
                        let op = PauliOp::parse(&t.op, n).with_context(|| format!("noise.terms[{k}].op = {:?}", t.op))?;
                        Ok((op, t.coeff))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(NoiseModel::Explicit(parsed))
            }
        }
    }
}

/// Either an explicit list or `points` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Linear { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Linear { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*points).map(|k| start + (stop - start) * k as f64 / (*points - 1) as f64).collect(),
            },
        }
    }
}

fn check_grid(field: &str, values: &[f64]) -> Result<()> {
    ensure!(!values.is_empty(), "{field} is empty");
    ensure!(values.iter().all(|v| v.is_finite() && *v >= 0.0), "{field} must contain finite, non-negative values");
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub zeta: f64,
    pub frequencies: Vec<f64>,
    pub times: Grid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifetimeConfig {
    pub zetas: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub tau_start: Option<f64>,
    pub tau_cap: Option<f64>,
    pub rel_tol: Option<f64>,
    pub threshold: Option<f64>,
}

impl LifetimeConfig {
    pub fn search(&self) -> LifetimeSearch {
        let d = LifetimeSearch::default();
        LifetimeSearch {
            tau_start: self.tau_start.unwrap_or(d.tau_start),
            tau_cap: self.tau_cap.unwrap_or(d.tau_cap),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            threshold: self.threshold.unwrap_or(d.threshold),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionConfig {
    Delta { j0: f64 },
    Gaussian { mean: f64, width: f64 },
    Uniform { low: f64, high: f64 },
    /// Inline `[[J, weight], ...]` or a two-column file relative to the config.
    Tabulated { table: Option<Vec<[f64; 2]>>, file: Option<PathBuf> },
}

impl DistributionConfig {
    pub fn distribution(&self, base: &Path) -> Result<CouplingDistribution> {
        let dist = match self {
            DistributionConfig::Delta { j0 } => CouplingDistribution::Delta { j0: *j0 },
            DistributionConfig::Gaussian { mean, width } => CouplingDistribution::Gaussian { mean: *mean, width: *width },
            DistributionConfig::Uniform { low, high } => CouplingDistribution::Uniform { low: *low, high: *high },
            DistributionConfig::Tabulated { table, file } => {
                let entries = match (table, file) {
                    (Some(t), None) => t.iter().map(|r| (r[0], r[1])).collect(),
                    (None, Some(f)) => read_table(&base.join(f))?,
                    _ => bail!("ising.distribution: give exactly one of `table` or `file`"),
                };
                CouplingDistribution::Tabulated(Table::new(entries).context("ising.distribution")?)
            }
        };
        dist.validate().context("ising.distribution")?;
        Ok(dist)
    }
}

/// Reads `J, weight` rows separated by commas or whitespace; `#` starts a comment.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading coupling table {}", path.display()))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parse = |s: &str| s.parse::<f64>().with_context(|| format!("{}:{}: bad number {s:?}", path.display(), k + 1));
        ensure!(fields.len() == 2, "{}:{}: expected two columns", path.display(), k + 1);
        rows.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingMemoryConfig {
    pub frequency: f64,
    pub tau: f64,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingConfig {
    pub distribution: DistributionConfig,
    pub window: [f64; 2],
    #[serde(default = "default_pairs")]
    pub pairs: Vec<String>,
    #[serde(default = "default_pair_qubits")]
    pub qubits: usize,
    /// Compare the memory with measured vs Ising-realized parity checks.
    pub memory: Option<IsingMemoryConfig>,
}

fn default_pairs() -> Vec<String> {
    vec!["Z1*Z2".into(), "X1*X2".into()]
}

fn default_pair_qubits() -> usize {
    2
}

/// A parsed configuration with the facts needed for reproducible headers.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub path: PathBuf,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig> {
    let bytes = fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let config: Config = toml::from_str(text).with_context(|| format!("parsing {}", path.display()))?;
    let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedConfig { config, path: path.to_path_buf(), sha256 })
}

impl Config {
    /// Mode-specific validation, run before any computation starts.
    pub fn validate(&self, mode: Mode) -> Result<()> {
        if let Some(m) = self.mode {
            ensure!(m == mode, "config is for mode `{m}` but `{mode}` was requested");
        }
        ensure!(self.samples >= 1, "samples must be at least 1");
        self.system.encoding()?;
        self.system.measured()?;
        self.system.error_set()?;
        self.noise.model(self.system.n)?;
        match mode {
            Mode::Check => {}
            Mode::Fig2 | Mode::Custom => {
                let sweep = self.sweep.as_ref().context("missing [sweep] section")?;
                check_grid("sweep.frequencies", &sweep.frequencies)?;
                check_grid("sweep.times", &sweep.times.values())?;
                let protected = mode == Mode::Fig2 || sweep.frequencies.iter().any(|&f| f > 0.0);
                ensure!(
                    !protected || (0.0..1.0).contains(&sweep.zeta),
                    "sweep.zeta = {} leaves nothing measured; protection needs 0 <= zeta < 1",
                    sweep.zeta
                );
                if mode == Mode::Fig2 {
                    ensure!(self.system.n == 3, "fig2 runs the three-qubit memory; system.n must be 3");
                }
            }
            Mode::Fig3 => {
                ensure!(self.system.n == 3, "fig3 runs the three-qubit memory; system.n must be 3");
                let life = self.lifetime.as_ref().context("missing [lifetime] section")?;
                check_grid("lifetime.frequencies", &life.frequencies)?;
                ensure!(!life.zetas.is_empty(), "lifetime.zetas is empty");
                for z in &life.zetas {
                    ensure!((0.0..1.0).contains(z), "lifetime.zetas: {z} outside [0, 1)");
                }
            }
            Mode::Ising => {
                let ising = self.ising.as_ref().context("missing [ising] section")?;
                ensure!(!ising.pairs.is_empty(), "ising.pairs is empty");
                parse_ops(ising.qubits, "ising.pairs", &ising.pairs)?;
                if let Some(m) = &ising.memory {
                    ensure!(self.system.n == 3, "ising.memory needs the three-qubit system");
                    ensure!(m.frequency > 0.0 && m.tau >= 0.0, "ising.memory needs frequency > 0 and tau >= 0");
                }
            }
        }
        Ok(())
    }
}
