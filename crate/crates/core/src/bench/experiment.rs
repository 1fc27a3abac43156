use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionSpec, Sampler};
use crate::bo::{run, BoTrace};
use crate::error::{Error, Result};

use super::regret::{inference_regret, simple_regret};
use super::spec::{ExperimentSpec, Instance};

/// One line of `regret.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRow {
    pub method: String,
    pub objective: String,
    pub seed: u64,
    pub t: usize,
    pub r_t: f64,
    #[serde(rename = "R_t")]
    pub inference_r_t: Option<f64>,
    pub acq_seconds: f64,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub sampler: Option<Sampler>,
}

/// One line of `summary.csv`: final-iteration regret quartiles over the
/// successful repetitions, and acquisition time over all their iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub objective: String,
    pub runs: usize,
    pub failed: usize,
    pub final_t: usize,
    pub r_median: f64,
    pub r_q1: f64,
    pub r_q3: f64,
    #[serde(rename = "R_median")]
    pub inference_median: Option<f64>,
    #[serde(rename = "R_q1")]
    pub inference_q1: Option<f64>,
    #[serde(rename = "R_q3")]
    pub inference_q3: Option<f64>,
    pub acq_mean: f64,
    pub acq_sd: f64,
}

/// One line of `failures.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub method: String,
    pub objective: String,
    pub seed: u64,
    pub completed: usize,
    pub error: String,
}

/// Outcome of one (method, objective, repetition) cell.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub method: String,
    pub objective: String,
    pub seed: u64,
    pub samples: Option<usize>,
    pub sampler: Option<Sampler>,
    /// Absent when the objective could not be prepared.
    pub trace: Option<BoTrace>,
    pub regret: Vec<RegretRow>,
    pub error: Option<String>,
}

impl RunResult {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    /// `trace_<method>_<objective>_<seed>.jsonl`
    pub fn trace_file_name(&self) -> String {
        format!("trace_{}_{}_{}.jsonl", self.method, self.objective, self.seed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    /// Ordered by method, then objective, then seed, as listed in the spec.
    pub runs: Vec<RunResult>,
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quartiles(mut v: Vec<f64>) -> Option<(f64, f64, f64)> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some((quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75)))
}

/// Aggregate regret rows; runs listed in `failed` (method, objective, seed)
/// are counted but excluded from the statistics.
pub fn summarize(rows: &[RegretRow], failed: &[(String, String, u64)]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(String, String), BTreeMap<u64, Vec<&RegretRow>>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.method.clone(), r.objective.clone())).or_default().entry(r.seed).or_default().push(r);
    }
    for (m, o, _) in failed {
        cells.entry((m.clone(), o.clone())).or_default();
    }
    cells
        .into_iter()
        .map(|((method, objective), by_seed)| {
            let is_failed = |s: u64| failed.iter().any(|(m, o, fs)| *m == method && *o == objective && *fs == s);
            let n_failed = failed.iter().filter(|(m, o, _)| *m == method && *o == objective).count();
            let ok: Vec<&Vec<&RegretRow>> = by_seed.iter().filter(|(s, _)| !is_failed(**s)).map(|(_, v)| v).collect();
            let finals: Vec<&RegretRow> = ok.iter().filter_map(|v| v.iter().max_by_key(|r| r.t).copied()).collect();
            let final_t = finals.iter().map(|r| r.t).max().unwrap_or(0);
            let r = quartiles(finals.iter().map(|r| r.r_t).collect());
            let big_r = quartiles(finals.iter().filter_map(|r| r.inference_r_t).collect());
            let times: Vec<f64> = ok.iter().flat_map(|v| v.iter().map(|r| r.acq_seconds)).collect();
            let n = times.len() as f64;
            let mean = if times.is_empty() { f64::NAN } else { times.iter().sum::<f64>() / n };
            let sd = if times.len() < 2 {
                0.0
            } else {
                (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            let (r_q1, r_median, r_q3) = r.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            SummaryRow {
                method,
                objective,
                runs: finals.len(),
                failed: n_failed,
                final_t,
                r_median,
                r_q1,
                r_q3,
                inference_median: big_r.map(|q| q.1),
                inference_q1: big_r.map(|q| q.0),
                inference_q3: big_r.map(|q| q.2),
                acq_mean: mean,
                acq_sd: sd,
            }
        })
        .collect()
}

impl ExperimentResult {
    pub fn regret_rows(&self) -> Vec<RegretRow> {
        self.runs.iter().flat_map(|r| r.regret.iter().cloned()).collect()
    }

    pub fn failures(&self) -> Vec<FailureRow> {
        self.runs
            .iter()
            .filter(|r| r.failed())
            .map(|r| FailureRow {
                method: r.method.clone(),
                objective: r.objective.clone(),
                seed: r.seed,
                completed: r.trace.as_ref().map_or(0, BoTrace::len),
                error: r.error.clone().unwrap_or_default(),
            })
            .collect()
    }

    pub fn failed_count(&self) -> usize {
        self.runs.iter().filter(|r| r.failed()).count()
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let failed: Vec<_> =
            self.runs.iter().filter(|r| r.failed()).map(|r| (r.method.clone(), r.objective.clone(), r.seed)).collect();
        summarize(&self.regret_rows(), &failed)
    }

    /// Write every trace plus `regret.csv`, `summary.csv` and
    /// `failures.csv` into `dir`, creating it if needed. Returns the trace
    /// paths in run order.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let mut paths = Vec::new();
        for r in &self.runs {
            if let Some(trace) = &r.trace {
                let path = dir.join(r.trace_file_name());
                let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                trace.write_jsonl(BufWriter::new(f)).map_err(io)?;
                paths.push(path);
            }
        }
        write_csv(&dir.join("regret.csv"), &REGRET_HEADER, &self.regret_rows())?;
        write_csv(&dir.join("summary.csv"), &SUMMARY_HEADER, &self.summary())?;
        write_csv(&dir.join("failures.csv"), &FAILURE_HEADER, &self.failures())?;
        Ok(paths)
    }
}

pub const REGRET_HEADER: [&str; 9] = ["method", "objective", "seed", "t", "r_t", "R_t", "acq_seconds", "K", "sampler"];
pub const SUMMARY_HEADER: [&str; 13] = [
    "method",
    "objective",
    "runs",
    "failed",
    "final_t",
    "r_median",
    "r_q1",
    "r_q3",
    "R_median",
    "R_q1",
    "R_q3",
    "acq_mean",
    "acq_sd",
];
pub const FAILURE_HEADER: [&str; 5] = ["method", "objective", "seed", "completed", "error"];

/// Write `header` then one serialized line per row.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let err = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Read back a CSV written by this module.
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let err = |e: csv::Error| Error::Config(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().map(|row| row.map_err(err)).collect()
}

fn execute(
    method: &AcquisitionSpec,
    instance: &std::result::Result<Instance, String>,
    spec: &ExperimentSpec,
    objective: &str,
    seed: u64,
) -> RunResult {
    let mut out = RunResult {
        method: method.label(),
        objective: objective.to_string(),
        seed,
        samples: method.samples(),
        sampler: method.sampler().filter(|_| method.samples().is_some()),
        trace: None,
        regret: Vec::new(),
        error: None,
    };
    let instance = match instance {
        Ok(i) => i,
        Err(e) => {
            out.error = Some(e.clone());
            return out;
        }
    };
    let result = spec
        .settings
        .config(method, instance)
        .and_then(|cfg| run(instance.objective.as_fn(), instance.objective.domain(), &cfg));
    let trace = match result {
        Ok(t) => t,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    match (simple_regret(&trace, &instance.objective), inference_regret(&trace, &instance.objective)) {
        (Ok(r), Ok(big_r)) => {
            out.regret = trace
                .records
                .iter()
                .zip(r.into_iter().zip(big_r))
                .map(|(rec, (r_t, rr))| RegretRow {
                    method: out.method.clone(),
                    objective: out.objective.clone(),
                    seed,
                    t: rec.t,
                    r_t,
                    inference_r_t: rr,
                    acq_seconds: rec.acq_seconds,
                    k: out.samples,
                    sampler: out.sampler,
                })
                .collect();
        }
        (Err(e), _) | (_, Err(e)) => out.error = Some(e.to_string()),
    }
    if let Some(a) = &trace.abort {
        out.error = Some(a.clone());
    }
    out.trace = Some(trace);
    out
}

/// Run every (method, objective, repetition) cell on a pool of `parallel`
/// workers (all logical cores when `None`). A cell that fails is recorded
/// and the rest carry on; results do not depend on the worker count.
pub fn run_experiment(spec: &ExperimentSpec, parallel: Option<usize>) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = parallel {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let seeds: Vec<u64> = (0..spec.repetitions as u64).map(|r| spec.seed.wrapping_add(r)).collect();

    pool.install(|| {
        let cells: Vec<(usize, u64)> =
            (0..spec.objectives.len()).flat_map(|o| seeds.iter().map(move |&s| (o, s))).collect();
        let instances: Vec<std::result::Result<Instance, String>> = cells
            .par_iter()
            .map(|&(o, s)| {
                spec.objectives[o].instantiate(s, spec.certify_probes).map_err(|e| {
                    warn!("objective {} (seed {s}) could not be prepared: {e}", spec.objectives[o].label());
                    e.to_string()
                })
            })
            .collect();
        let jobs: Vec<(usize, usize)> =
            (0..spec.methods.len()).flat_map(|m| (0..cells.len()).map(move |c| (m, c))).collect();
        let runs: Vec<RunResult> = jobs
            .par_iter()
            .map(|&(m, c)| {
                let (o, seed) = cells[c];
                let r = execute(&spec.methods[m], &instances[c], spec, &spec.objectives[o].label(), seed);
                info!("{} on {} (seed {seed}) done", r.method, r.objective);
                r
            })
            .collect();
        Ok(ExperimentResult { runs })
    })
}
