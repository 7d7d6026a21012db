use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use seqforge::io::{format_sequence, format_trace, parse_sequence};
use seqforge::metrics::{autocorrelation_fft, isl, profile_csv};
use seqforge::solvers::solve;
use seqforge::Sequence64;

use crate::error::{HarnessError, IoContext, Result};
use crate::plan::{AlgorithmSpec, Cell, ExperimentPlan};
use crate::report::{export_summary, ExperimentReport, RunRecord};

pub const SUMMARY_JSON: &str = "summary.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Fails with an I/O error unless `dir` exists (or can be created) and
/// accepts a new file.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).at(dir)?;
    let probe = dir.join(".seqforge-write-probe");
    fs::write(&probe, b"").at(&probe)?;
    fs::remove_file(&probe).at(&probe)?;
    Ok(())
}

struct PreparedCell {
    cell: Cell,
    init_file: PathBuf,
    init_rel: String,
    init_sha256: String,
    initial_isl: f64,
}

fn prepare_cell(cell: Cell, out: &Path) -> Result<PreparedCell> {
    let z0 = cell.init.generate(cell.length, cell.seed)?;
    let text = format_sequence(&z0);
    let init_rel = format!("init/{}.txt", cell.stem());
    let init_file = out.join(&init_rel);
    fs::write(&init_file, &text).at(&init_file)?;
    Ok(PreparedCell {
        cell,
        init_file,
        init_rel,
        init_sha256: sha256_hex(text.as_bytes()),
        initial_isl: isl(&autocorrelation_fft(&z0)),
    })
}

fn run_one(prepared: &PreparedCell, spec: &AlgorithmSpec, plan: &ExperimentPlan, out: &Path) -> Result<RunRecord> {
    // Every algorithm reads the shared file and checks its hash, so the
    // pairing is enforced rather than assumed.
    let bytes = fs::read(&prepared.init_file).at(&prepared.init_file)?;
    if sha256_hex(&bytes) != prepared.init_sha256 {
        return Err(HarnessError::InitMismatch {
            path: prepared.init_file.clone(),
        });
    }
    let text = String::from_utf8_lossy(&bytes);
    let z0: Sequence64 = parse_sequence(&text)?;

    let result = solve(&z0, &plan.solver_config(spec))?;

    let cell = &prepared.cell;
    let stem = format!("runs/{}_{}", cell.stem(), spec.label());
    let trace_rel = format!("{stem}.trace.csv");
    let sequence_rel = format!("{stem}.seq.txt");
    let acf_rel = format!("{stem}.acf.csv");
    for (rel, contents) in [
        (&trace_rel, format_trace(&result.trace)),
        (&sequence_rel, format_sequence(&result.sequence)),
        (&acf_rel, profile_csv(&autocorrelation_fft(&result.sequence))?),
    ] {
        let path = out.join(rel);
        fs::write(&path, contents).at(&path)?;
    }
    log::info!(
        "{} {}: {} iterations, ISL {:.6e}",
        cell.stem(),
        spec.label(),
        result.trace.iterations(),
        result.final_isl
    );

    Ok(RunRecord {
        length: cell.length,
        init: cell.init.to_string(),
        algorithm: spec.algorithm_name(),
        strategy: spec.strategy_name().to_string(),
        trial: cell.trial,
        seed: cell.seed,
        iterations: result.trace.iterations(),
        initial_isl: prepared.initial_isl,
        final_isl: result.final_isl,
        final_psl: result.final_psl,
        wall_seconds: result.trace.elapsed_seconds(),
        stop_reason: result.trace.stop_reason.to_string(),
        sequence_file: sequence_rel,
        trace_file: trace_rel,
        init_file: prepared.init_rel.clone(),
        init_sha256: prepared.init_sha256.clone(),
    })
}

/// Runs every (cell, algorithm) pair of `plan` on up to `workers` threads and
/// writes initializations, traces, sequences, autocorrelations and the
/// summary under `out`.
///
/// Records come back in plan order whatever the worker count.
pub fn run_plan(plan: &ExperimentPlan, out: impl AsRef<Path>, workers: usize) -> Result<ExperimentReport> {
    let out = out.as_ref();
    plan.validate()?;
    ensure_writable(out)?;
    for sub in ["init", "runs"] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).at(&dir)?;
    }

    let prepared = plan
        .cells()
        .into_iter()
        .map(|cell| prepare_cell(cell, out))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&PreparedCell, &AlgorithmSpec)> = prepared
        .iter()
        .flat_map(|p| plan.algorithms.iter().map(move |a| (p, a)))
        .collect();

    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Plan(format!("cannot start {workers} workers: {e}")))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|(p, spec)| run_one(p, spec, plan, out))
            .collect::<Result<Vec<_>>>()
    })?;

    let report = ExperimentReport::new(records, workers);
    export_summary(&report, out.join(SUMMARY_JSON))?;
    Ok(report)
}

/// Reloads each record's sequence file and returns the largest relative
/// gap between its ISL and the recorded `final_isl`.
pub fn max_reload_error(report: &ExperimentReport, out: impl AsRef<Path>) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in &report.records {
        let path = out.as_ref().join(&r.sequence_file);
        let text = fs::read_to_string(&path).at(&path)?;
        let z: Sequence64 = parse_sequence(&text)?;
        let value = isl(&autocorrelation_fft(&z));
        worst = worst.max((value - r.final_isl).abs() / r.final_isl.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
