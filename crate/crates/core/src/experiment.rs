//! Multi-seed experiment harness.
//!
//! An experiment is described by a flat `key=value` file, one pair per line,
//! `#` starting a comment line:
//!
//! ```text
//! algorithm=pso
//! problem=sphere
//! dim=10
//! swarm_size=30
//! max_iterations=2000
//! seeds=1..20
//! ```
//!
//! Every seed produces `trace_seed<SEED>.csv` and the experiment as a whole a
//! `summary.json`, all written to a temporary name first and renamed into
//! place when complete.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aco::{optimize_aco_with, AcoConfig};
use crate::error::{Error, Result};
use crate::problems::{benchmark, load_tsp_file};
use crate::pso::{optimize_with, PsoConfig, Topology};
use crate::rng::RNG_ALGORITHM;
use crate::trace::{RunTrace, TerminationCriteria, TraceEntry};

pub const TRACE_HEADER: &str = "iteration,best_fitness,evaluations";
pub const SUMMARY_FILE: &str = "summary.json";
pub const DEFAULT_OUTPUT_DIR: &str = "swarmkit-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Pso,
    Aco,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmConfig {
    Pso {
        /// Benchmark name.
        problem: String,
        dim: usize,
        config: PsoConfig,
    },
    Aco {
        /// Instance file path, relative to the config file's directory.
        problem: String,
        config: AcoConfig,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmConfig,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    /// Directory relative paths in the config resolve against.
    pub base_dir: Option<PathBuf>,
}

const COMMON_KEYS: &[&str] = &[
    "algorithm",
    "problem",
    "seeds",
    "max_iterations",
    "target_fitness",
    "output",
];
const PSO_KEYS: &[&str] = &["dim", "swarm_size", "c1", "c2", "vmax", "topology"];
const ACO_KEYS: &[&str] = &["num_ants", "alpha", "beta", "rho", "q", "tau0", "tau_floor"];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, kind: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_err(format!("{key}: expected {kind}, got {value:?}")))
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_value(key, value, "a real number")?;
    if !v.is_finite() {
        return Err(config_err(format!(
            "{key}: expected a finite real number, got {value:?}"
        )));
    }
    Ok(v)
}

fn parse_positive_int(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse_value(key, value, "a positive integer")?;
    if v == 0 {
        return Err(config_err(format!("{key} must be at least 1")));
    }
    Ok(v)
}

fn parse_topology(value: &str) -> Result<Topology> {
    match value {
        "global" => Ok(Topology::Global),
        "ring" => Ok(Topology::Ring(1)),
        _ => match value.strip_prefix("ring:") {
            Some(k) => Ok(Topology::Ring(parse_positive_int("topology", k)?)),
            None => Err(config_err(format!(
                "topology: expected global, ring or ring:K, got {value:?}"
            ))),
        },
    }
}

fn format_topology(t: Topology) -> String {
    match t {
        Topology::Global => "global".into(),
        Topology::Ring(k) => format!("ring:{k}"),
    }
}

/// Expands `a..b` (inclusive) ranges and comma lists.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = parse_value("seeds", a.trim(), "an unsigned integer")?;
            let b: u64 = parse_value("seeds", b.trim(), "an unsigned integer")?;
            if a > b {
                return Err(config_err(format!("seeds: empty range {part}")));
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(parse_value("seeds", part, "an unsigned integer")?);
        }
    }
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(config_err(format!("seeds: duplicate seed {}", w[0])));
    }
    Ok(seeds)
}

/// Parses and validates an experiment description, filling defaults
/// (`c1 = c2 = 2`; `alpha = 1`, `beta = 2`, `rho = 0.5`, `q = 1`, `tau0 = 1`).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(config_err(format!("duplicate key {key}")));
        }
        pairs.push((key, value));
    }

    let kind = match pairs
        .iter()
        .find(|(k, _)| *k == "algorithm")
        .map(|(_, v)| *v)
    {
        Some("pso") => AlgorithmKind::Pso,
        Some("aco") => AlgorithmKind::Aco,
        Some(other) => {
            return Err(config_err(format!(
                "algorithm: expected pso or aco, got {other:?}"
            )))
        }
        None => return Err(config_err("missing key algorithm")),
    };
    let (own, other, algo_name) = match kind {
        AlgorithmKind::Pso => (PSO_KEYS, ACO_KEYS, "pso"),
        AlgorithmKind::Aco => (ACO_KEYS, PSO_KEYS, "aco"),
    };

    let mut pso = PsoConfig::default();
    let mut aco = AcoConfig::default();
    let mut dim = 10usize;
    let mut problem = None;
    let mut seeds = None;
    let mut max_iterations = None;
    let mut target = None;
    let mut output = None;

    for &(key, value) in &pairs {
        if !COMMON_KEYS.contains(&key) && !own.contains(&key) {
            if other.contains(&key) {
                return Err(config_err(format!(
                    "key {key} does not apply to algorithm {algo_name}"
                )));
            }
            return Err(config_err(format!("unknown key {key}")));
        }
        match key {
            "algorithm" => {}
            "problem" => {
                if value.is_empty() {
                    return Err(config_err("problem must not be empty"));
                }
                problem = Some(value.to_string());
            }
            "seeds" => seeds = Some(parse_seeds(value)?),
            "max_iterations" => max_iterations = Some(parse_positive_int(key, value)? as u64),
            "target_fitness" => target = Some(parse_real(key, value)?),
            "output" => output = Some(PathBuf::from(value)),
            "dim" => dim = parse_positive_int(key, value)?,
            "swarm_size" => pso.swarm_size = parse_positive_int(key, value)?,
            "c1" | "c2" => {
                let c = parse_real(key, value)?;
                if c < 0.0 {
                    return Err(config_err(format!("{key} must be >= 0")));
                }
                if key == "c1" {
                    pso.c1 = c;
                } else {
                    pso.c2 = c;
                }
            }
            "vmax" => {
                let v = parse_real(key, value)?;
                if v <= 0.0 {
                    return Err(config_err("vmax must be > 0"));
                }
                pso.vmax = Some(v);
            }
            "topology" => pso.topology = parse_topology(value)?,
            "num_ants" => aco.num_ants = Some(parse_positive_int(key, value)?),
            "alpha" | "beta" => {
                let v = parse_real(key, value)?;
                if v < 0.0 {
                    return Err(config_err(format!("{key} must be >= 0")));
                }
                if key == "alpha" {
                    aco.alpha = v;
                } else {
                    aco.beta = v;
                }
            }
            "rho" => {
                aco.rho = parse_real(key, value)?;
                if !(0.0..=1.0).contains(&aco.rho) {
                    return Err(config_err("rho out of [0,1]"));
                }
            }
            "q" => {
                aco.q = parse_real(key, value)?;
                if aco.q <= 0.0 {
                    return Err(config_err("q must be > 0"));
                }
            }
            "tau0" | "tau_floor" => {
                let v = parse_real(key, value)?;
                if v <= 0.0 {
                    return Err(config_err(format!("{key} must be > 0")));
                }
                if key == "tau0" {
                    aco.tau0 = v;
                } else {
                    aco.tau_floor = v;
                }
            }
            _ => unreachable!("key lists cover every match arm"),
        }
    }

    let problem = problem.ok_or_else(|| config_err("missing key problem"))?;
    let seeds = seeds.ok_or_else(|| config_err("missing key seeds"))?;

    let algorithm = match kind {
        AlgorithmKind::Pso => {
            if let Some(m) = max_iterations {
                pso.termination = TerminationCriteria::new(m, target)?;
            } else {
                pso.termination =
                    TerminationCriteria::new(pso.termination.max_iterations(), target)?;
            }
            if let Topology::Ring(k) = pso.topology {
                if k >= pso.swarm_size {
                    return Err(config_err(format!(
                        "topology: ring radius {k} must be below swarm_size {}",
                        pso.swarm_size
                    )));
                }
            }
            pso.validate()?;
            benchmark(&problem, dim).map_err(|e| config_err(format!("problem: {e}")))?;
            AlgorithmConfig::Pso {
                problem,
                dim,
                config: pso,
            }
        }
        AlgorithmKind::Aco => {
            let m = max_iterations.unwrap_or(aco.termination.max_iterations());
            aco.termination = TerminationCriteria::new(m, target)?;
            if aco.tau0 < aco.tau_floor {
                return Err(config_err("tau0 must be >= tau_floor"));
            }
            aco.validate()?;
            AlgorithmConfig::Aco {
                problem,
                config: aco,
            }
        }
    };

    Ok(ExperimentConfig {
        algorithm,
        seeds,
        output,
        base_dir: None,
    })
}

/// Reads and parses a config file; relative paths inside it resolve against
/// the file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    config.base_dir = path.parent().map(Path::to_path_buf);
    Ok(config)
}

impl ExperimentConfig {
    pub fn kind(&self) -> AlgorithmKind {
        match self.algorithm {
            AlgorithmConfig::Pso { .. } => AlgorithmKind::Pso,
            AlgorithmConfig::Aco { .. } => AlgorithmKind::Aco,
        }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Output directory from the config, or the default.
    pub fn output_dir(&self) -> PathBuf {
        match &self.output {
            Some(p) => self.resolve(p),
            None => PathBuf::from(DEFAULT_OUTPUT_DIR),
        }
    }

    /// Every effective parameter, defaults included, as text.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        let termination = match &self.algorithm {
            AlgorithmConfig::Pso {
                problem,
                dim,
                config,
            } => {
                put("algorithm", "pso".into());
                put("problem", problem.clone());
                put("dim", dim.to_string());
                put("swarm_size", config.swarm_size.to_string());
                put("c1", config.c1.to_string());
                put("c2", config.c2.to_string());
                put("vmax", config.vmax.map_or("auto".into(), |v| v.to_string()));
                put("topology", format_topology(config.topology));
                config.termination
            }
            AlgorithmConfig::Aco { problem, config } => {
                put("algorithm", "aco".into());
                put("problem", problem.clone());
                put(
                    "num_ants",
                    config.num_ants.map_or("auto".into(), |v| v.to_string()),
                );
                put("alpha", config.alpha.to_string());
                put("beta", config.beta.to_string());
                put("rho", config.rho.to_string());
                put("q", config.q.to_string());
                put("tau0", config.tau0.to_string());
                put("tau_floor", config.tau_floor.to_string());
                config.termination
            }
        };
        put("max_iterations", termination.max_iterations().to_string());
        put(
            "target_fitness",
            termination
                .target_fitness()
                .map_or("none".into(), |v| v.to_string()),
        );
        m
    }
}

fn format_trace_row(out: &mut String, e: &TraceEntry) {
    let _ = writeln!(out, "{},{},{}", e.iteration, e.best_fitness, e.evaluations);
}

/// CSV text for one trace: header, then one LF-terminated row per entry.
/// Reals use the shortest representation that parses back exactly.
pub fn emit_trace_csv(trace: &RunTrace) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for e in &trace.entries {
        format_trace_row(&mut out, e);
    }
    out
}

/// Inverse of [`emit_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceEntry>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, TRACE_HEADER)) => {}
        _ => return Err(Error::parse(1, format!("expected header {TRACE_HEADER}"))),
    }
    lines
        .map(|(i, line)| {
            let bad = || Error::parse(i + 1, format!("malformed trace row {line:?}"));
            let mut f = line.split(',');
            let (Some(it), Some(best), Some(ev), None) = (f.next(), f.next(), f.next(), f.next())
            else {
                return Err(bad());
            };
            Ok(TraceEntry {
                iteration: it.parse().map_err(|_| bad())?,
                best_fitness: best.parse().map_err(|_| bad())?,
                evaluations: ev.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub best: f64,
    pub iterations: u64,
    pub evaluations: u64,
    pub non_finite_evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_position: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_tour: Option<Vec<usize>>,
    /// Volatile; excluded from reproducibility comparisons.
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: AlgorithmKind,
    pub rng: String,
    pub config: BTreeMap<String, String>,
    pub runs: Vec<RunRecord>,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub total_evaluations: u64,
}

impl RunSummary {
    pub fn from_runs(
        algorithm: AlgorithmKind,
        config: BTreeMap<String, String>,
        runs: Vec<RunRecord>,
    ) -> Self {
        let bests: Vec<f64> = runs.iter().map(|r| r.best).collect();
        RunSummary {
            algorithm,
            rng: RNG_ALGORITHM.to_string(),
            config,
            min: bests.iter().copied().fold(f64::INFINITY, f64::min),
            median: median(&bests),
            mean: bests.iter().sum::<f64>() / bests.len() as f64,
            total_evaluations: runs.iter().map(|r| r.evaluations).sum(),
            runs,
        }
    }

    /// Copy with every wall-clock field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut s = self.clone();
        for r in &mut s.runs {
            r.wall_clock_seconds = 0.0;
        }
        s
    }
}

/// Middle value, or the mean of the two middle values for even counts.
/// NaN for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Pretty JSON with struct fields in declaration order and config keys
/// sorted.
pub fn emit_summary(summary: &RunSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary is always serializable");
    s.push('\n');
    s
}

pub fn parse_summary(text: &str) -> Result<RunSummary> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
}

fn temp_path(final_path: &Path) -> PathBuf {
    let name = final_path.file_name().expect("file path").to_string_lossy();
    final_path.with_file_name(format!(".{name}.tmp"))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = temp_path(path);
    let res = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

/// Streams rows to a hidden temp file; `finish` renames it into place and
/// dropping without finishing deletes it.
struct TraceFile {
    tmp: PathBuf,
    path: PathBuf,
    out: Option<BufWriter<File>>,
    row: String,
}

impl TraceFile {
    fn create(path: PathBuf) -> Result<Self> {
        let tmp = temp_path(&path);
        let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut tf = TraceFile {
            tmp,
            path,
            out: Some(BufWriter::new(file)),
            row: String::new(),
        };
        tf.write_str(&format!("{TRACE_HEADER}\n"))?;
        Ok(tf)
    }

    fn write_str(&mut self, s: &str) -> Result<()> {
        let out = self.out.as_mut().expect("open until finished");
        out.write_all(s.as_bytes())
            .map_err(|e| Error::io(&self.tmp, e))
    }

    fn append(&mut self, e: &TraceEntry) -> Result<()> {
        let mut row = std::mem::take(&mut self.row);
        row.clear();
        format_trace_row(&mut row, e);
        let res = self.write_str(&row);
        self.row = row;
        res
    }

    fn finish(mut self) -> Result<()> {
        let out = self.out.take().expect("open until finished");
        out.into_inner()
            .map_err(|e| e.into_error())
            .and_then(|f| f.sync_all())
            .and_then(|_| fs::rename(&self.tmp, &self.path))
            .map_err(|e| Error::io(&self.path, e))
    }
}

impl Drop for TraceFile {
    fn drop(&mut self) {
        // Still open or failed rename: nothing valid to keep.
        if self.tmp.exists() {
            self.out.take();
            let _ = fs::remove_file(&self.tmp);
        }
    }
}

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed{seed}.csv")
}

enum Prepared {
    Pso(crate::objective::ObjectiveSpec, PsoConfig),
    Aco(crate::aco::DistanceGraph, AcoConfig),
}

fn run_one(prepared: &Prepared, seed: u64, dir: &Path) -> Result<RunRecord> {
    let start = Instant::now();
    let path = dir.join(trace_file_name(seed));
    let mut file = TraceFile::create(path)?;
    let mut observe = |e: &TraceEntry| file.append(e);
    let mut record = match prepared {
        Prepared::Pso(objective, config) => {
            let out = optimize_with(objective, config, seed, &mut observe)?;
            record_from(
                seed,
                &out.trace,
                out.best_fitness,
                Some(out.best_position),
                None,
            )
        }
        Prepared::Aco(graph, config) => {
            let out = optimize_aco_with(graph, config, seed, &mut observe)?;
            record_from(
                seed,
                &out.trace,
                out.best.length,
                None,
                Some(out.best.order),
            )
        }
    };
    file.finish()?;
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}

fn record_from(
    seed: u64,
    trace: &RunTrace,
    best: f64,
    best_position: Option<Vec<f64>>,
    best_tour: Option<Vec<usize>>,
) -> RunRecord {
    RunRecord {
        seed,
        best,
        iterations: trace.len() as u64,
        evaluations: trace.evaluations(),
        non_finite_evaluations: trace.non_finite_evaluations,
        best_position,
        best_tour,
        wall_clock_seconds: 0.0,
    }
}

/// Runs every seed, writing one trace per seed and a summary into `output`.
///
/// Seeds run on up to `workers` threads; each run is single-threaded and
/// fully determined by its seed, so outputs do not depend on `workers`. On
/// failure no trace from this invocation is left behind.
pub fn run_experiment(
    config: &ExperimentConfig,
    output: &Path,
    workers: usize,
) -> Result<RunSummary> {
    if workers == 0 {
        return Err(config_err("workers must be at least 1"));
    }
    if config.seeds.is_empty() {
        return Err(config_err("seeds: at least one seed required"));
    }
    let prepared = match &config.algorithm {
        AlgorithmConfig::Pso {
            problem,
            dim,
            config: pso,
        } => {
            let b = benchmark(problem, *dim)?;
            Prepared::Pso(
                b.spec,
                PsoConfig {
                    workers: 1,
                    ..pso.clone()
                },
            )
        }
        AlgorithmConfig::Aco {
            problem,
            config: aco,
        } => {
            let inst = load_tsp_file(&config.resolve(Path::new(problem)))?;
            Prepared::Aco(
                inst.graph,
                AcoConfig {
                    workers: 1,
                    ..aco.clone()
                },
            )
        }
    };
    fs::create_dir_all(output).map_err(|e| Error::io(output, e))?;

    let results: Vec<Result<RunRecord>> = crate::with_workers(workers, || {
        config
            .seeds
            .par_iter()
            .map(|&seed| run_one(&prepared, seed, output))
            .collect()
    })?;

    if let Some(pos) = results.iter().position(Result::is_err) {
        for (seed, r) in config.seeds.iter().zip(&results) {
            if r.is_ok() {
                let _ = fs::remove_file(output.join(trace_file_name(*seed)));
            }
        }
        return Err(results.into_iter().nth(pos).expect("found").unwrap_err());
    }
    let runs = results.into_iter().map(|r| r.expect("checked")).collect();
    let summary = RunSummary::from_runs(config.kind(), config.echo(), runs);
    write_atomic(&output.join(SUMMARY_FILE), &emit_summary(&summary))?;
    Ok(summary)
}
