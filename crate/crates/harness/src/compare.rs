use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use seqforge::io::{format_sequence, format_trace};
use seqforge::majorizer::BoundStrategy;
use seqforge::solvers::{solve, Algorithm, IterationTrace, DEFAULT_MAX_ITERATIONS};
use seqforge::Sequence64;

use crate::error::{IoContext, Result};
use crate::plan::{AlgorithmSpec, Initialization};
use crate::runner::ensure_writable;

/// Relative spread of final ISL allowed across FISL strategies.
pub const STRATEGY_AGREEMENT: f64 = 0.01;
/// Relative spread of final ISL allowed across the MM algorithms.
pub const ALGORITHM_AGREEMENT: f64 = 0.05;
pub const COMPARISON_CSV_HEADER: &str = "label,iterations,wall_seconds,final_isl,final_psl,stop_reason";

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub algorithm: String,
    pub strategy: String,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub final_isl: f64,
    pub final_psl: f64,
    pub stop_reason: String,
    /// Excluded from the agreement check (CAN).
    pub exempt: bool,
    #[serde(skip)]
    pub trace: IterationTrace,
    #[serde(skip)]
    pub sequence: Sequence64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub length: usize,
    pub init: Initialization,
    pub seed: u64,
    pub tolerance: f64,
    pub rows: Vec<ComparisonRow>,
    /// `(max - min) / min` of final ISL over non-exempt rows.
    pub spread: f64,
    pub threshold: f64,
    pub agrees: bool,
    #[serde(skip)]
    pub initial: Sequence64,
}

impl Comparison {
    pub fn row(&self, label: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn csv(&self) -> String {
        let mut out = format!("{COMPARISON_CSV_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.6},{:e},{:e},{}",
                r.label, r.iterations, r.wall_seconds, r.final_isl, r.final_psl, r.stop_reason
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// Writes `comparison.csv`, `comparison.json`, `init.txt`, and one
    /// trace and final sequence per row under `out`.
    pub fn write(&self, out: impl AsRef<Path>) -> Result<()> {
        let out = out.as_ref();
        ensure_writable(out)?;
        let mut files = vec![
            (out.join("comparison.csv"), self.csv()),
            (out.join("comparison.json"), serde_json::to_string_pretty(self)? + "\n"),
            (out.join("init.txt"), format_sequence(&self.initial)),
        ];
        for r in &self.rows {
            files.push((out.join(format!("{}.trace.csv", r.label)), format_trace(&r.trace)));
            files.push((out.join(format!("{}.seq.txt", r.label)), format_sequence(&r.sequence)));
        }
        for (path, contents) in files {
            fs::write(&path, contents).at(&path)?;
        }
        Ok(())
    }
}

fn run_specs(
    specs: &[AlgorithmSpec],
    length: usize,
    init: Initialization,
    seed: u64,
    tolerance: f64,
    threshold: f64,
) -> Result<Comparison> {
    init.check_length(length)?;
    let z0 = init.generate(length, seed)?;
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let result = solve(&z0, &spec.config(tolerance, DEFAULT_MAX_ITERATIONS))?;
        rows.push(ComparisonRow {
            label: spec.label(),
            algorithm: spec.algorithm_name(),
            strategy: spec.strategy_name().to_string(),
            iterations: result.trace.iterations(),
            wall_seconds: result.trace.elapsed_seconds(),
            final_isl: result.final_isl,
            final_psl: result.final_psl,
            stop_reason: result.trace.stop_reason.to_string(),
            exempt: spec.algorithm == Algorithm::Can,
            trace: result.trace,
            sequence: result.sequence,
        });
    }
    let checked = rows.iter().filter(|r| !r.exempt).map(|r| r.final_isl);
    let lo = checked.clone().fold(f64::INFINITY, f64::min);
    let hi = checked.fold(f64::NEG_INFINITY, f64::max);
    let spread = if hi <= lo { 0.0 } else { (hi - lo) / lo };
    if spread > threshold {
        log::warn!("final ISL spread {spread:.4} exceeds {threshold}");
    }
    Ok(Comparison {
        length,
        init,
        seed,
        tolerance,
        rows,
        spread,
        threshold,
        agrees: spread <= threshold,
        initial: z0,
    })
}

/// FISL under TR, EI, BEI and BEFFT from one shared `z0`.
pub fn compare_strategies(length: usize, init: Initialization, seed: u64, tolerance: f64) -> Result<Comparison> {
    let specs: Vec<_> = BoundStrategy::ALL.into_iter().map(AlgorithmSpec::fisl).collect();
    run_specs(&specs, length, init, seed, tolerance, STRATEGY_AGREEMENT)
}

/// FISL-BEFFT, CAN, MISL, ACC-MISL, ISL-NEW and ACC-ISL-NEW from one
/// shared `z0`. CAN is reported but left out of the agreement check.
pub fn compare_algorithms(length: usize, init: Initialization, seed: u64, tolerance: f64) -> Result<Comparison> {
    run_specs(
        &AlgorithmSpec::comparison_set(),
        length,
        init,
        seed,
        tolerance,
        ALGORITHM_AGREEMENT,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_stops_at_once() {
        let c = compare_strategies(1, Initialization::Random, 3, 1e-5).unwrap();
        assert_eq!(c.rows.len(), 4);
        for r in &c.rows {
            assert_eq!(r.iterations, 1, "{}", r.label);
        }
        assert!(c.agrees);
    }

    #[test]
    fn frank_needs_square_length() {
        assert!(compare_algorithms(10, Initialization::Frank, 0, 1e-5).is_err());
    }

    #[test]
    fn csv_has_one_row_per_run() {
        let c = compare_algorithms(9, Initialization::Frank, 0, 1e-5).unwrap();
        let csv = c.csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with(COMPARISON_CSV_HEADER));
        assert!(c.row("CAN").unwrap().exempt);
        assert!(!c.row("ACC-ISL-NEW").unwrap().exempt);
    }
}
