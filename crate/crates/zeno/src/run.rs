//! One entry point per mode. Each writes its files into the output directory
//! and returns a summary for the terminal.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use zeno_core::conditions::{check_conditions, reduce_hamiltonian, ConditionReport};
use zeno_core::ising::realize_parity_projection;
use zeno_core::memory::{ChannelEstimate, MemoryProtocol};
use zeno_core::pauli::{Pauli, PauliOp};
use zeno_core::simulator::measurement_channel;

use crate::config::{parse_ops, Config, LoadedConfig, Mode};
use crate::output::{flag, flat_json, float, Csv, Header};
use crate::sweep;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// `false` only when a condition check fails.
    pub success: bool,
    pub summary: String,
}

pub const DEFAULT_OUTPUT: &str = "output";

pub fn run(mode: Mode, config_path: &Path, options: &Options) -> Result<Outcome> {
    let loaded = crate::config::load(config_path)?;
    loaded.config.validate(mode)?;
    let seed = options.seed.unwrap_or(loaded.config.seed);
    let out_dir = options
        .output
        .clone()
        .or_else(|| loaded.config.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let header = Header { mode, config_sha256: loaded.sha256.clone(), seed, samples: loaded.config.samples };
    let ctx = RunContext { loaded: &loaded, header, seed, out_dir: &out_dir };
    let pool = sweep::thread_pool(options.workers)?;
    pool.install(|| match mode {
        Mode::Check => check(&ctx),
        Mode::Fig2 => fig2(&ctx),
        Mode::Fig3 => fig3(&ctx),
        Mode::Ising => ising(&ctx),
        Mode::Custom => custom(&ctx),
    })
}

struct RunContext<'a> {
    loaded: &'a LoadedConfig,
    header: Header,
    seed: u64,
    out_dir: &'a Path,
}

impl RunContext<'_> {
    fn config(&self) -> &Config {
        &self.loaded.config
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn write_csv(&self, name: &str, csv: &Csv) -> Result<PathBuf> {
        let path = self.path(name);
        csv.write(&path, &self.header)?;
        Ok(path)
    }

    fn condition_report(&self) -> Result<(ConditionReport, Vec<PauliOp>)> {
        let system = &self.config().system;
        let measured = system.measured()?;
        let errors = system.error_set()?;
        let report = check_conditions(&system.encoding()?, &measured, &errors)?;
        let reduced: Vec<PauliOp> = reduce_hamiltonian(&measured, &errors)?.ops().copied().collect();
        Ok((report, reduced))
    }

    /// The memory with the configured rounds at strength `zeta`.
    fn memory(&self, zeta: f64) -> Result<MemoryProtocol> {
        let schedule = self.config().system.schedule(zeta)?;
        MemoryProtocol::new(schedule, 0.0, 0.0).context("fig2/fig3 need a schedule that protects the three-qubit code")
    }
}

fn join_ops(ops: &[PauliOp]) -> String {
    ops.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")
}

fn check(ctx: &RunContext) -> Result<Outcome> {
    let (report, reduced) = ctx.condition_report()?;
    let mut pairs = vec![
        ("version".to_string(), crate::output::VERSION.to_string()),
        ("config_sha256".to_string(), ctx.header.config_sha256.clone()),
    ];
    pairs.extend(report.key_values());
    pairs.push(("reduced_hamiltonian".into(), join_ops(&reduced)));
    let text = format!("{report}reduced Hamiltonian terms: {}\n", join_ops(&reduced));
    let files = vec![ctx.write_text("check.txt", &text)?, ctx.write_text("check.json", &flat_json(&pairs))?];
    Ok(Outcome { files, success: report.all_hold(), summary: text })
}

fn estimate_row(frequency: f64, tau: f64, e: &ChannelEstimate) -> Vec<String> {
    vec![
        float(frequency),
        float(tau),
        float(e.channel.p_x),
        float(e.p_x_stderr),
        float(e.channel.p_y),
        float(e.p_y_stderr),
        float(e.channel.p_z),
        float(e.p_z_stderr),
        float(e.channel.fidelity),
    ]
}

pub const FIG2_COLUMNS: [&str; 9] = ["f", "tau", "p_X", "p_X_stderr", "p_Y", "p_Y_stderr", "p_Z", "p_Z_stderr", "F"];
pub const FIG3_COLUMNS: [&str; 4] = ["zeta", "f", "lifetime", "crossed_flag"];

fn fig2(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config();
    let sweep_cfg = cfg.sweep.as_ref().context("missing [sweep] section")?;
    let template = ctx.memory(sweep_cfg.zeta)?;
    let noise = cfg.noise.model(3)?;
    let hams = sweep::sample_hamiltonians(&noise, 3, cfg.samples, ctx.seed)?;
    let rows = sweep::memory_sweep(&template, &hams, &sweep_cfg.frequencies, &sweep_cfg.times.values())?;
    let mut csv = Csv::new(&FIG2_COLUMNS);
    for r in &rows {
        csv.push(estimate_row(r.frequency, r.tau, &r.estimate))?;
    }
    let path = ctx.write_csv("fig2.csv", &csv)?;
    let summary = format!("{} rows ({} samples per point) -> {}\n", csv.len(), cfg.samples, path.display());
    Ok(Outcome { files: vec![path], success: true, summary })
}

fn fig3(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config();
    let life_cfg = cfg.lifetime.as_ref().context("missing [lifetime] section")?;
    let template = ctx.memory(0.0)?;
    let noise = cfg.noise.model(3)?;
    let hams = sweep::sample_hamiltonians(&noise, 3, cfg.samples, ctx.seed)?;
    let search = life_cfg.search();
    let mut csv = Csv::new(&FIG3_COLUMNS);
    let mut summary = String::new();
    for &zeta in &life_cfg.zetas {
        for &f in &life_cfg.frequencies {
            let life = sweep::lifetime(&template, &hams, zeta, f, &search)
                .with_context(|| format!("lifetime at zeta = {zeta}, f = {f}"))?;
            csv.push(vec![float(zeta), float(f), float(life.tau), flag(life.crossed).into()])?;
            let note = if life.crossed { "" } else { " (cap reached)" };
            summary.push_str(&format!("zeta = {zeta}, f = {f}: lifetime {:.4}{note}\n", life.tau));
        }
    }
    let path = ctx.write_csv("fig3.csv", &csv)?;
    Ok(Outcome { files: vec![path], success: true, summary })
}

pub const ISING_COLUMNS: [&str; 7] = ["pair", "t", "p_sigma_sigma", "q", "residual", "max_deviation", "exact_flag"];

/// Largest deviation that still counts as exact: a few ulps per channel entry.
const EXACT_DEVIATION: f64 = 1e-14;

fn is_parity_pair(op: &PauliOp) -> bool {
    let letters: Vec<Pauli> = op.support().iter().map(|&q| op.letter(q)).collect();
    op.phase() == 0 && letters.len() == 2 && letters[0] == letters[1] && matches!(letters[0], Pauli::X | Pauli::Z)
}

fn ising(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config();
    let ising = cfg.ising.as_ref().context("missing [ising] section")?;
    let dist = ising.distribution.distribution(ctx.loaded.base_dir())?;
    let window = (ising.window[0], ising.window[1]);
    let pairs = parse_ops(ising.qubits, "ising.pairs", &ising.pairs)?;
    let dim = 1usize << ising.qubits;

    let mut csv = Csv::new(&ISING_COLUMNS);
    let mut text = String::new();
    for pair in &pairs {
        let (r, channel) = realize_parity_projection(&dist, pair, window).with_context(|| format!("pair {pair}"))?;
        let deviation = channel.max_deviation(&measurement_channel(pair, 0.0)?, dim)?;
        csv.push(vec![
            pair.to_string(),
            float(r.t),
            float(r.p_sigma_sigma),
            float(r.apply_probability),
            float(r.residual_cross_term),
            float(deviation),
            flag(deviation <= EXACT_DEVIATION).into(),
        ])?;
        text.push_str(&format!(
            "{pair}: t = {:.10}, p_sigma_sigma = {:.10}, q = {:.10}, residual = {:.3e}, max deviation = {deviation:.3e}\n",
            r.t, r.p_sigma_sigma, r.apply_probability, r.residual_cross_term
        ));
    }
    let mut files = vec![ctx.write_csv("ising.csv", &csv)?];

    if let Some(mem) = &ising.memory {
        let measured_protocol = ctx.memory(0.0)?.at(mem.frequency, mem.tau)?;
        let mut realized_protocol = measured_protocol.clone();
        let mut substituted = Vec::new();
        for op in measured_protocol.schedule().operators() {
            if is_parity_pair(&op) {
                let (_, channel) = realize_parity_projection(&dist, &op, window).with_context(|| format!("pair {op}"))?;
                realized_protocol.replace_measurement(&op, channel)?;
                substituted.push(op);
            }
        }
        if substituted.is_empty() {
            bail!("no XX or ZZ parity check in system.rounds to substitute");
        }
        let samples = mem.samples.unwrap_or(cfg.samples);
        let hams = sweep::sample_hamiltonians(&cfg.noise.model(3)?, 3, samples, ctx.seed)?;
        let a = sweep::estimate_parallel(&measured_protocol, &hams)?.channel.probabilities();
        let b = sweep::estimate_parallel(&realized_protocol, &hams)?.channel.probabilities();
        let mut mcsv = Csv::new(&["quantity", "measured", "realized", "abs_diff"]);
        text.push_str(&format!(
            "memory at f = {}, tau = {}, {samples} samples, realized checks: {}\n",
            mem.frequency,
            mem.tau,
            join_ops(&substituted)
        ));
        for (k, name) in ["F", "p_X", "p_Y", "p_Z"].iter().enumerate() {
            let d = (a[k] - b[k]).abs();
            mcsv.push(vec![name.to_string(), float(a[k]), float(b[k]), float(d)])?;
            text.push_str(&format!("  {name}: measured {:.10}, realized {:.10}, |diff| = {d:.3e}\n", a[k], b[k]));
        }
        files.push(ctx.write_csv("ising_memory.csv", &mcsv)?);
    }
    files.push(ctx.write_text("ising.txt", &text)?);
    Ok(Outcome { files, success: true, summary: text })
}

pub const CUSTOM_COLUMNS: [&str; 5] = ["operator", "f", "tau", "drift", "drift_stderr"];

fn custom(ctx: &RunContext) -> Result<Outcome> {
    let cfg = ctx.config();
    let system = &cfg.system;
    let sweep_cfg = cfg.sweep.as_ref().context("missing [sweep] section")?;
    let (report, reduced) = ctx.condition_report()?;
    let mut text = format!("{report}reduced Hamiltonian terms: {}\n", join_ops(&reduced));

    let channels = system.schedule(sweep_cfg.zeta)?.channels();
    let hams = sweep::sample_hamiltonians(&cfg.noise.model(system.n)?, system.n, cfg.samples, ctx.seed)?;
    let times = sweep_cfg.times.values();
    let mut csv = Csv::new(&CUSTOM_COLUMNS);
    for op in system.encoding()?.logical_ops() {
        let dense = op.to_dense()?;
        for d in sweep::logical_drift(&dense, &channels, &hams, &sweep_cfg.frequencies, &times)? {
            csv.push(vec![op.to_string(), float(d.frequency), float(d.tau), float(d.mean), float(d.stderr)])?;
        }
    }
    let csv_path = ctx.write_csv("custom.csv", &csv)?;
    text.push_str(&format!("{} drift rows -> {}\n", csv.len(), csv_path.display()));
    let files = vec![csv_path, ctx.write_text("custom.txt", &text)?];
    Ok(Outcome { files, success: true, summary: text })
}
