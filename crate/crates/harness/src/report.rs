use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, IoContext, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str =
    "length,init,algorithm,strategy,trial,iterations,final_isl,final_psl,wall_seconds,stop_reason";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub length: usize,
    pub init: String,
    pub algorithm: String,
    pub strategy: String,
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub initial_isl: f64,
    pub final_isl: f64,
    pub final_psl: f64,
    pub wall_seconds: f64,
    pub stop_reason: String,
    /// Paths relative to the output directory.
    pub sequence_file: String,
    pub trace_file: String,
    pub init_file: String,
    pub init_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub length: usize,
    pub init: String,
    pub algorithm: String,
    pub strategy: String,
    pub runs: usize,
    pub mean_wall_seconds: f64,
    pub min_wall_seconds: f64,
    pub max_wall_seconds: f64,
    pub mean_iterations: f64,
    pub min_iterations: usize,
    pub max_iterations: usize,
    pub mean_final_isl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    /// Worker count the runs were timed under.
    pub workers: usize,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl ExperimentReport {
    pub fn new(records: Vec<RunRecord>, workers: usize) -> Self {
        let aggregates = aggregate(&records);
        Self {
            schema_version: SCHEMA_VERSION,
            workers,
            records,
            aggregates,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).at(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Per-init means over trials, one entry per (length, init, algorithm, strategy).
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(usize, &str, &str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.length, &r.init, &r.algorithm, &r.strategy))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((length, init, algorithm, strategy), runs)| {
            let n = runs.len() as f64;
            let wall = runs.iter().map(|r| r.wall_seconds);
            let iters = runs.iter().map(|r| r.iterations);
            Aggregate {
                length,
                init: init.to_string(),
                algorithm: algorithm.to_string(),
                strategy: strategy.to_string(),
                runs: runs.len(),
                mean_wall_seconds: wall.clone().sum::<f64>() / n,
                min_wall_seconds: wall.clone().fold(f64::INFINITY, f64::min),
                max_wall_seconds: wall.fold(0.0, f64::max),
                mean_iterations: iters.clone().sum::<usize>() as f64 / n,
                min_iterations: iters.clone().min().unwrap_or(0),
                max_iterations: iters.max().unwrap_or(0),
                mean_final_isl: runs.iter().map(|r| r.final_isl).sum::<f64>() / n,
            }
        })
        .collect()
}

pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in &report.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{:e},{:e},{:.6},{}",
            r.length,
            r.init,
            r.algorithm,
            r.strategy,
            r.trial,
            r.iterations,
            r.final_isl,
            r.final_psl,
            r.wall_seconds,
            r.stop_reason
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Writes the summary JSON to `json_path` and the flat CSV next to it
/// with a `.csv` extension. Returns both paths.
pub fn export_summary(report: &ExperimentReport, json_path: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    if report.records.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let json_path = json_path.as_ref().to_path_buf();
    let csv_path = json_path.with_extension("csv");
    let json = serde_json::to_string_pretty(report)?;
    fs::write(&json_path, json + "\n").at(&json_path)?;
    fs::write(&csv_path, summary_csv(report)).at(&csv_path)?;
    Ok((json_path, csv_path))
}
