//! Experiment configs, the run pipeline, parameter sweeps, presets and file
//! output.
//!
//! A run prepares the Fock state, evolves it exactly on a uniform time grid,
//! replays one compiled Trotter step per grid interval, and optionally samples
//! and mitigates shots at every grid point.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{lower, trotter_step, Circuit, Scheme};
use crate::engine::{apply_circuit, sample_counts_stream, RNG_ALGORITHM};
use crate::exact::SectorPropagator;
use crate::lattice::{Flavor, ModelParams};
use crate::observables::{
    connected_correlation, correlation, edge_density, edge_probability, occupation_from_z, participation_entropy,
    product_correlation, radial_distribution, CorrelationMatrix, DensityProfile, Source, ZMeasurement,
};
use crate::parallel::{map_ordered, with_workers};
use crate::pauli::hamiltonian;
use crate::readout::{corrupt_stream, mitigate_z_value, ReadoutModel};
use crate::state::{fock_index, prepare_fock_state};
use crate::{ConfigIssue, Error, Result, StateVector};

pub const DENSITY_HEADER: &str = "step,time,site,density,source";
pub const SERIES_HEADER: &str = "step,time,name,value,source";
pub const CORRELATION_HEADER: &str = "time,i,j,value,source";

/// Recognised entries of `outputs`.
pub const OUTPUT_NAMES: [&str; 7] = [
    "density",
    "P0",
    "R2",
    "nE",
    "S2",
    "correlation",
    "correlation-connected",
];
const SERIES_NAMES: [&str; 4] = ["P0", "R2", "nE", "S2"];

pub const DEFAULT_STEPS: usize = 10;

fn default_steps() -> usize {
    DEFAULT_STEPS
}

fn default_outputs() -> Vec<String> {
    ["density", "P0", "R2", "nE", "S2"].map(String::from).to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub initial_occupations: Vec<usize>,
    pub t_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub scheme: Scheme,
    /// Shots per grid point; 0 disables sampling.
    #[serde(default)]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<ReadoutModel>,
    #[serde(default)]
    pub mitigation: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<String>,
}

impl ExperimentConfig {
    pub fn new(model: ModelParams, initial_occupations: Vec<usize>, t_max: f64) -> Self {
        Self {
            model,
            initial_occupations,
            t_max,
            steps: DEFAULT_STEPS,
            scheme: Scheme::Sequential,
            shots: 0,
            readout: None,
            mitigation: false,
            seed: 0,
            outputs: default_outputs(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn wants(&self, output: &str) -> bool {
        self.outputs.iter().any(|o| o == output)
    }

    /// Every failed check, addressed by field path.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = self.model.issues("model");
        let sites = self.model.sites;
        if self.initial_occupations.is_empty() {
            out.push(ConfigIssue::new(
                "initial_occupations",
                "at least one site must be occupied",
            ));
        }
        let mut seen = BTreeSet::new();
        for (k, &site) in self.initial_occupations.iter().enumerate() {
            let field = format!("initial_occupations[{k}]");
            if site >= sites {
                out.push(ConfigIssue::new(field, format!("site {site} outside 0..{sites}")));
            } else if !seen.insert(site) {
                out.push(ConfigIssue::new(field, format!("site {site} listed twice")));
            }
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            out.push(ConfigIssue::new("t_max", "must be finite and >= 0"));
        }
        if self.steps == 0 {
            out.push(ConfigIssue::new("steps", "must be >= 1"));
        }
        if let Some(readout) = &self.readout {
            out.extend(readout.issues(sites, "readout"));
        }
        if self.mitigation {
            if self.readout.is_none() {
                out.push(ConfigIssue::new("mitigation", "requires a readout model"));
            }
            if self.shots == 0 {
                out.push(ConfigIssue::new("mitigation", "requires shots > 0"));
            }
        }
        for (k, name) in self.outputs.iter().enumerate() {
            if !OUTPUT_NAMES.contains(&name.as_str()) {
                out.push(ConfigIssue::new(
                    format!("outputs[{k}]"),
                    format!("unknown output '{name}' (expected one of {})", OUTPUT_NAMES.join(", ")),
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }

    /// Sources this config produces, in output order.
    pub fn sources(&self) -> Vec<Source> {
        let mut out = vec![Source::Exact, Source::TrotterExact];
        if self.shots > 0 {
            out.push(Source::TrotterSampled);
        }
        if self.mitigation {
            out.push(Source::TrotterSampledMitigated);
        }
        out
    }

    /// The full evolution circuit (preparation followed by every step), lowered.
    pub fn circuit(&self) -> Result<Circuit> {
        self.validate()?;
        let mut c = crate::circuit::preparation(self.model.sites, &self.initial_occupations)?;
        let evolution = crate::circuit::trotter_circuit(&self.model, self.t_max, self.steps, self.scheme)?;
        c.extend(&lower(&evolution))?;
        c.meta = evolution.meta;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// Everything one source produced over the time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub source: Source,
    pub profiles: Vec<DensityProfile>,
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<CorrelationMatrix>,
}

impl SourceRecord {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub scheme: Scheme,
    pub flavor: Flavor,
    pub version: String,
    pub rng: String,
    pub entropy_log: String,
    /// Seconds since the Unix epoch; the only field allowed to differ between
    /// identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    pub sources: Vec<SourceRecord>,
    pub metadata: Metadata,
}

impl RunRecord {
    pub fn source(&self, source: Source) -> Option<&SourceRecord> {
        self.sources.iter().find(|s| s.source == source)
    }

    /// Stamps the current wall-clock time into the metadata.
    pub fn stamp(&mut self) {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.metadata.timestamp = Some(now);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Per-step Z expectations with an optional measurement handle for
/// two-site terms.
struct Snapshot<'a, M: ZMeasurement> {
    z: Vec<f64>,
    handle: Option<&'a M>,
}

struct Accumulator<'c> {
    config: &'c ExperimentConfig,
    record: SourceRecord,
}

impl<'c> Accumulator<'c> {
    fn new(config: &'c ExperimentConfig, source: Source) -> Self {
        let series = SERIES_NAMES
            .iter()
            .filter(|n| config.wants(n))
            .map(|n| Series {
                name: n.to_string(),
                values: Vec::with_capacity(config.steps + 1),
            })
            .collect();
        Self {
            config,
            record: SourceRecord {
                source,
                profiles: Vec::with_capacity(config.steps + 1),
                series,
                correlations: Vec::new(),
            },
        }
    }

    fn push<M: ZMeasurement>(&mut self, time: f64, snap: Snapshot<'_, M>) -> Result<()> {
        let profile = DensityProfile {
            time,
            values: snap.z.iter().map(|&z| occupation_from_z(z)).collect(),
            source: self.record.source,
        };
        let particles = self.config.initial_occupations.len();
        for s in &mut self.record.series {
            let v = match s.name.as_str() {
                "P0" => edge_probability(&profile),
                "R2" => radial_distribution(&profile),
                "nE" => edge_density(&profile),
                _ => participation_entropy(&profile.values, 2, particles)?,
            };
            s.values.push(v);
        }
        if self.config.wants("correlation") {
            self.record.correlations.push(match snap.handle {
                Some(m) => correlation(m, time)?,
                None => product_correlation(&snap.z, time),
            });
        }
        if self.config.wants("correlation-connected") && self.record.source.is_exact() {
            if let Some(m) = snap.handle {
                self.record.correlations.push(connected_correlation(m, time)?);
            }
        }
        if self.config.wants("density") {
            self.record.profiles.push(profile);
        }
        Ok(())
    }
}

fn z_all(m: &impl ZMeasurement) -> Result<Vec<f64>> {
    (0..m.sites()).map(|i| m.z(i)).collect()
}

/// Executes one experiment. Deterministic in the config, seed included.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let params = &config.model;
    let times = config.times();
    let psi0 = prepare_fock_state(params.sites, &config.initial_occupations)?;
    fock_index(params.sites, &config.initial_occupations)?;

    let mut exact = Accumulator::new(config, Source::Exact);
    let propagator = SectorPropagator::new(&hamiltonian(params), config.initial_occupations.len())?;
    for &t in &times {
        let psi = propagator.evolve(&psi0, t)?;
        exact.push(
            t,
            Snapshot {
                z: z_all(&psi)?,
                handle: Some(&psi),
            },
        )?;
    }

    let step = lower(&Circuit::from_gates(
        params.sites,
        trotter_step(params, config.dt(), config.scheme),
    )?);
    let mut trotter = Accumulator::new(config, Source::TrotterExact);
    let mut sampled = (config.shots > 0).then(|| Accumulator::new(config, Source::TrotterSampled));
    let mut mitigated = config
        .mitigation
        .then(|| Accumulator::new(config, Source::TrotterSampledMitigated));
    let mut psi: StateVector = psi0;
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            apply_circuit(&mut psi, &step)?;
        }
        trotter.push(
            t,
            Snapshot {
                z: z_all(&psi)?,
                handle: Some(&psi),
            },
        )?;
        if let Some(acc) = sampled.as_mut() {
            let stream = 2 * k as u64;
            let mut counts = sample_counts_stream(&psi, config.shots, config.seed, stream)?;
            if let Some(model) = &config.readout {
                counts = corrupt_stream(&counts, model, config.seed, stream + 1)?;
            }
            acc.push(
                t,
                Snapshot {
                    z: z_all(&counts)?,
                    handle: Some(&counts),
                },
            )?;
            if let (Some(acc), Some(model)) = (mitigated.as_mut(), &config.readout) {
                let z = z_all(&counts)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, z)| mitigate_z_value(z, model, i))
                    .collect::<Result<Vec<_>>>()?;
                acc.push::<StateVector>(t, Snapshot { z, handle: None })?;
            }
        }
    }

    let mut sources = vec![exact.record, trotter.record];
    sources.extend(sampled.map(|a| a.record));
    sources.extend(mitigated.map(|a| a.record));
    Ok(RunRecord {
        config: config.clone(),
        times,
        sources,
        metadata: Metadata {
            seed: config.seed,
            scheme: config.scheme,
            flavor: params.flavor,
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_ALGORITHM.to_string(),
            entropy_log: "natural".to_string(),
            timestamp: None,
        },
    })
}

/// Model parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Modulation,
    Phase,
    Interaction,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Modulation => "lambda_J",
            SweepAxis::Phase => "phi_J",
            SweepAxis::Interaction => "V",
        }
    }

    pub fn apply(self, config: &mut ExperimentConfig, value: f64) {
        let m = &mut config.model;
        match self {
            SweepAxis::Modulation => m.modulation = value,
            SweepAxis::Phase => m.phase = value,
            SweepAxis::Interaction => m.interaction = value,
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_J" => Ok(SweepAxis::Modulation),
            "phi_J" => Ok(SweepAxis::Phase),
            "V" => Ok(SweepAxis::Interaction),
            other => Err(Error::Config(vec![ConfigIssue::new(
                "axis",
                format!("unknown sweep axis '{other}' (expected lambda_J, phi_J or V)"),
            )])),
        }
    }
}

/// Configs of a sweep: point `k` takes `values[k]` and seed `seed + k`.
pub fn sweep_configs(base: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<ExperimentConfig>> {
    let mut issues = Vec::new();
    let configs = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if !v.is_finite() {
                issues.push(ConfigIssue::new(format!("values[{k}]"), "must be finite"));
            }
            let mut c = base.clone();
            axis.apply(&mut c, v);
            c.seed = base.seed.wrapping_add(k as u64);
            c
        })
        .collect();
    if issues.is_empty() {
        Ok(configs)
    } else {
        Err(Error::Config(issues))
    }
}

/// Runs every sweep point concurrently on at most `workers` threads
/// (`None`: all available). Results keep the order of `values`.
pub fn sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
    workers: Option<usize>,
) -> Result<Vec<RunRecord>> {
    run_all(&sweep_configs(base, axis, values)?, workers)
}

/// Runs independent configs concurrently, preserving order.
pub fn run_all(configs: &[ExperimentConfig], workers: Option<usize>) -> Result<Vec<RunRecord>> {
    with_workers(workers, || map_ordered(configs, |_, c| run(c)))
        .into_iter()
        .collect()
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 10] = [
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig12", "fig13",
];

/// Small-chain scenario configs. Every preset samples 8192 shots per grid
/// point through a symmetric 3% readout channel and mitigates.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let walk = |sites: usize, occupied: &[usize], lambda: f64, phase: f64, v: f64, t: f64| {
        let mut c = ExperimentConfig::new(
            ModelParams::aah(sites, lambda, phase).with_interaction(v),
            occupied.to_vec(),
            t,
        );
        c.shots = 8192;
        c.readout = Some(ReadoutModel::symmetric(0.03));
        c.mitigation = true;
        c.seed = 1;
        c
    };
    let pair_cases = [(0.0, 0.0), (0.5, 0.0), (0.9, 0.0), (0.9, 2.0)];
    let configs = match name {
        "fig3" => [0.1, 0.5, 0.9].map(|l| walk(10, &[0], l, 0.0, 0.0, 5.0)).to_vec(),
        "fig4" => (0..10)
            .map(|k| walk(10, &[0], k as f64 / 10.0, 0.0, 0.0, 5.0))
            .collect(),
        "fig5" => [0.0, PI / 2.0, PI].map(|p| walk(5, &[0], 0.9, p, 0.0, 5.0)).to_vec(),
        "fig6" => [0.0, PI / 2.0, PI].map(|p| walk(5, &[4], 0.9, p, 0.0, 5.0)).to_vec(),
        "fig7" => vec![
            walk(7, &[0, 6], 0.9, 0.0, 0.0, 5.0),
            walk(8, &[0, 7], 0.9, 0.0, 0.0, 5.0),
        ],
        "fig8" => [(0.0, 0.0), (0.9, 0.0), (0.9, PI / 2.0)]
            .map(|(l, p)| walk(10, &[5], l, p, 0.0, 5.0))
            .to_vec(),
        "fig9" => [0.0, 1.0, 2.0].map(|v| walk(7, &[0, 3], 0.9, 0.0, v, 5.0)).to_vec(),
        "fig10" => pair_cases.map(|(l, v)| walk(8, &[3, 4], l, 0.0, v, 5.0)).to_vec(),
        "fig12" => pair_cases
            .map(|(l, v)| {
                let mut c = walk(8, &[3, 4], l, 0.0, v, 3.0);
                c.outputs = ["density", "correlation", "correlation-connected"]
                    .map(String::from)
                    .to_vec();
                c
            })
            .to_vec(),
        "fig13" => pair_cases
            .map(|(l, v)| {
                let mut c = walk(8, &[3, 4], l, 0.0, v, 3.0);
                c.outputs = ["density", "S2"].map(String::from).to_vec();
                c
            })
            .to_vec(),
        other => {
            return Err(Error::Config(vec![ConfigIssue::new(
                "preset",
                format!("unknown preset '{other}' (expected one of {})", PRESET_NAMES.join(", ")),
            )]))
        }
    };
    Ok(configs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Validation(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

pub fn density_csv(record: &RunRecord) -> String {
    let mut out = format!("{DENSITY_HEADER}\n");
    for src in &record.sources {
        for (step, p) in src.profiles.iter().enumerate() {
            for (site, v) in p.values.iter().enumerate() {
                out += &format!("{step},{},{site},{v},{}\n", p.time, src.source);
            }
        }
    }
    out
}

pub fn series_csv(record: &RunRecord) -> String {
    let mut out = format!("{SERIES_HEADER}\n");
    for src in &record.sources {
        for s in &src.series {
            for (step, (v, t)) in s.values.iter().zip(&record.times).enumerate() {
                out += &format!("{step},{t},{},{v},{}\n", s.name, src.source);
            }
        }
    }
    out
}

/// One row per matrix entry. Connected matrices are labelled with a
/// `-connected` suffix on the source.
pub fn correlation_csv(record: &RunRecord) -> String {
    let mut out = format!("{CORRELATION_HEADER}\n");
    for src in &record.sources {
        for c in &src.correlations {
            let suffix = match c.kind {
                crate::observables::CorrelationKind::Product => "",
                crate::observables::CorrelationKind::Connected => "-connected",
            };
            for (i, row) in c.values.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    out += &format!("{},{i},{j},{v},{}{suffix}\n", c.time, src.source);
                }
            }
        }
    }
    out
}

/// Writes `contents` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Files for one record, as `(file name, contents)` pairs.
pub fn render(record: &RunRecord, format: Format) -> Result<Vec<(&'static str, String)>> {
    let c = &record.config;
    Ok(match format {
        Format::Json => vec![("record.json", record.to_json()? + "\n")],
        Format::Csv => {
            let mut files = Vec::new();
            if c.wants("density") {
                files.push(("density.csv", density_csv(record)));
            }
            if SERIES_NAMES.iter().any(|n| c.wants(n)) {
                files.push(("series.csv", series_csv(record)));
            }
            if c.wants("correlation") || c.wants("correlation-connected") {
                files.push(("correlation.csv", correlation_csv(record)));
            }
            files
        }
    })
}

/// Writes records under `dir`. A single record goes directly into `dir`;
/// several go into `run-000`, `run-001`, ... Returns the written paths.
pub fn emit(records: &[RunRecord], format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (k, record) in records.iter().enumerate() {
        let target = if records.len() == 1 {
            dir.to_path_buf()
        } else {
            dir.join(format!("run-{k:03}"))
        };
        fs::create_dir_all(&target).map_err(|e| Error::io(&target, e))?;
        for (name, contents) in render(record, format)? {
            let path = target.join(name);
            write_atomic(&path, contents.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}
