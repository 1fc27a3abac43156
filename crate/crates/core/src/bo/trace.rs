use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{KernelParams, Partition};
use crate::maxvalue::MaxValueSamples;

/// An evaluation: the point, the noisy observation and the true value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Vec<f64>,
    pub y: f64,
    pub f: f64,
}

/// One loop iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub t: usize,
    pub x: Vec<f64>,
    pub y: f64,
    pub f: f64,
    /// Best noisy observation so far, initial design included.
    pub best_y: f64,
    /// Sampled maxima used this iteration, one set per component.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y_star: Vec<MaxValueSamples>,
    pub acquisition_value: f64,
    /// Wall-clock time spent choosing `x`, model fit included.
    pub acq_seconds: f64,
    /// Maximizer of the posterior mean once `y` is observed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<Vec<f64>>,
    /// Kernel after a refit made at this iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refit: Option<KernelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Everything a run did, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoTrace {
    pub method: String,
    pub seed: u64,
    pub initial: Vec<Observation>,
    pub records: Vec<IterationRecord>,
    pub final_kernel: KernelParams,
    /// Dimension groups of an additive run.
    pub partition: Option<Partition>,
    /// Why the run stopped early, if it did.
    pub abort: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header { method: String, seed: u64, initial: Vec<Observation> },
    Iteration(IterationRecord),
    Footer { final_kernel: KernelParams, partition: Option<Partition>, abort: Option<String> },
}

impl BoTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// True values at the queried points, in order.
    pub fn true_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f).collect()
    }

    pub fn queries(&self) -> impl Iterator<Item = &[f64]> {
        self.records.iter().map(|r| r.x.as_slice())
    }

    /// One JSON object per line: a header, one line per iteration, a footer.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = Line::Header { method: self.method.clone(), seed: self.seed, initial: self.initial.clone() };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for r in &self.records {
            serde_json::to_writer(&mut w, &Line::Iteration(r.clone()))?;
            writeln!(w)?;
        }
        let footer = Line::Footer {
            final_kernel: self.final_kernel.clone(),
            partition: self.partition.clone(),
            abort: self.abort.clone(),
        };
        serde_json::to_writer(&mut w, &footer)?;
        writeln!(w)
    }

    /// Inverse of [`BoTrace::write_jsonl`]; errors carry the line number.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut header = None;
        let mut records = Vec::new();
        let mut footer = None;
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line =
                serde_json::from_str(&line).map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
            match parsed {
                Line::Header { method, seed, initial } if header.is_none() => header = Some((method, seed, initial)),
                Line::Iteration(rec) if header.is_some() && footer.is_none() => records.push(rec),
                Line::Footer { final_kernel, partition, abort } if header.is_some() && footer.is_none() => {
                    footer = Some((final_kernel, partition, abort))
                }
                _ => return Err(Error::Config(format!("line {}: record out of order", i + 1))),
            }
        }
        let (method, seed, initial) = header.ok_or_else(|| Error::Config("trace has no header line".into()))?;
        let (final_kernel, partition, abort) =
            footer.ok_or_else(|| Error::Config("trace has no footer line".into()))?;
        Ok(Self { method, seed, initial, records, final_kernel, partition, abort })
    }
}
