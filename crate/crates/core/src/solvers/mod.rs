//! ISL minimizers: FISL with a selectable bound strategy, the CAN, MISL and
//! ISL-NEW baselines, and SQUAREM acceleration for the latter two.
//!
//! All solvers share one driver loop. Iteration 0 of the trace is the
//! starting point; iteration `k` is the state after `k` updates. The loop
//! stops when consecutive ISL values satisfy [`stop_check`] or after
//! `max_iterations` updates.

mod baselines;
mod fisl;
mod squarem;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::majorizer::BoundStrategy;
use crate::metrics::{autocorrelation_with, isl, psl};
use crate::num::Real;
use crate::sequence::Sequence;
use crate::spectral::SpectralPlan;

pub use baselines::{can_step, misl_step, CanStepper, MislStepper, ISL_NEW_WEIGHT, MISL_WEIGHT};
pub use fisl::{fisl_step, fisl_update, FislStep, FislStepper};
pub use squarem::{squarem_cycle, squarem_wrap, SquaremOutcome, SquaremStepper};

/// Default relative ISL change at which iteration stops.
pub const DEFAULT_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Fisl,
    Can,
    Misl,
    IslNew,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Fisl => "FISL",
            Algorithm::Can => "CAN",
            Algorithm::Misl => "MISL",
            Algorithm::IslNew => "ISL-NEW",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fisl" => Ok(Algorithm::Fisl),
            "can" => Ok(Algorithm::Can),
            "misl" => Ok(Algorithm::Misl),
            "islnew" => Ok(Algorithm::IslNew),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Only read by FISL.
    pub bound_strategy: BoundStrategy,
    /// Only read by MISL and ISL-NEW.
    pub accelerate: bool,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seed for random initializations made on behalf of this run.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Fisl,
            bound_strategy: BoundStrategy::Befft,
            accelerate: false,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn fisl(strategy: BoundStrategy) -> Self {
        Self {
            bound_strategy: strategy,
            ..Self::default()
        }
    }

    pub fn baseline(algorithm: Algorithm, accelerate: bool) -> Self {
        Self {
            algorithm,
            accelerate,
            ..Self::default()
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether SQUAREM is actually applied (ignored outside MISL/ISL-NEW).
    pub fn accelerated(&self) -> bool {
        self.accelerate && matches!(self.algorithm, Algorithm::Misl | Algorithm::IslNew)
    }

    /// Short display label, e.g. `FISL-BEFFT`, `ACC-MISL`.
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::Fisl => format!("FISL-{}", self.bound_strategy),
            a if self.accelerated() => format!("ACC-{a}"),
            a => a.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(StopReason::Converged),
            "max_iterations" => Ok(StopReason::MaxIterations),
            other => Err(Error::Config(format!("unknown stop reason `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub isl: f64,
    pub elapsed_seconds: f64,
    pub bound_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iteration)
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_seconds)
    }

    pub fn isl_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.isl)
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult<T> {
    pub sequence: Sequence<T>,
    pub trace: IterationTrace,
    pub final_isl: T,
    /// Zero for `P = 1`, which has no sidelobes.
    pub final_psl: T,
    /// Projection entries that had zero magnitude and kept their old phase.
    pub degenerate_projections: usize,
}

/// `|curr - prev| / max(1, prev) ≤ tolerance`, inclusive at the boundary.
///
/// The difference is allowed one unit of rounding in each input, so a
/// boundary case written in decimal (`100 → 99.999` at `1e-5`) still stops.
pub fn stop_check<T: Real>(prev_isl: T, curr_isl: T, tolerance: T) -> bool {
    let delta = (curr_isl - prev_isl).abs();
    let rounding = T::epsilon() * (prev_isl.abs() + curr_isl.abs());
    delta <= tolerance * prev_isl.max(T::one()) + rounding
}

/// One solver's iteration state.
pub trait Stepper<T: Real> {
    /// Performs one update; returns the majorizer constant when the
    /// algorithm has one.
    fn advance(&mut self) -> Result<Option<T>>;

    fn current(&self) -> &Sequence<T>;

    /// ISL of [`current`](Self::current).
    fn current_isl(&self) -> T;

    fn degenerate_projections(&self) -> usize {
        0
    }
}

/// Runs `config.algorithm` from `z0`.
pub fn solve<T: Real>(z0: &Sequence<T>, config: &SolverConfig) -> Result<SolverResult<T>> {
    solve_observed(z0, config, |_, _| {})
}

/// [`solve`] with a callback receiving every iterate, starting with `z0` at
/// iteration 0.
pub fn solve_observed<T: Real, F>(z0: &Sequence<T>, config: &SolverConfig, observer: F) -> Result<SolverResult<T>>
where
    F: FnMut(usize, &Sequence<T>),
{
    config.validate()?;
    let plan = Arc::new(SpectralPlan::new(z0.len())?);
    match (config.algorithm, config.accelerated()) {
        (Algorithm::Fisl, _) => {
            let stepper = FislStepper::new(plan.clone(), z0.clone(), config.bound_strategy);
            drive(stepper, &plan, config, observer)
        }
        (Algorithm::Can, _) => drive(CanStepper::new(plan.clone(), z0.clone()), &plan, config, observer),
        (Algorithm::Misl | Algorithm::IslNew, accelerate) => {
            let weight = if config.algorithm == Algorithm::Misl {
                MISL_WEIGHT
            } else {
                ISL_NEW_WEIGHT
            };
            if accelerate {
                drive(SquaremStepper::new(plan.clone(), z0.clone(), weight), &plan, config, observer)
            } else {
                drive(MislStepper::new(plan.clone(), z0.clone(), weight), &plan, config, observer)
            }
        }
    }
}

pub fn solve_fisl<T: Real>(z0: &Sequence<T>, config: &SolverConfig) -> Result<SolverResult<T>> {
    expect_algorithm(config, Algorithm::Fisl)?;
    solve(z0, config)
}

pub fn solve_can<T: Real>(z0: &Sequence<T>, config: &SolverConfig) -> Result<SolverResult<T>> {
    expect_algorithm(config, Algorithm::Can)?;
    solve(z0, config)
}

pub fn solve_misl<T: Real>(z0: &Sequence<T>, config: &SolverConfig) -> Result<SolverResult<T>> {
    expect_algorithm(config, Algorithm::Misl)?;
    solve(z0, config)
}

pub fn solve_islnew<T: Real>(z0: &Sequence<T>, config: &SolverConfig) -> Result<SolverResult<T>> {
    expect_algorithm(config, Algorithm::IslNew)?;
    solve(z0, config)
}

fn expect_algorithm(config: &SolverConfig, want: Algorithm) -> Result<()> {
    if config.algorithm != want {
        return Err(Error::Config(format!(
            "configuration selects {}, expected {want}",
            config.algorithm
        )));
    }
    Ok(())
}

fn drive<T: Real, S: Stepper<T>, F>(
    mut stepper: S,
    plan: &SpectralPlan<T>,
    config: &SolverConfig,
    mut observer: F,
) -> Result<SolverResult<T>>
where
    F: FnMut(usize, &Sequence<T>),
{
    let tolerance = T::from_f64_lossy(config.tolerance);
    let start = Instant::now();
    let mut prev = stepper.current_isl();
    let mut records = vec![TraceRecord {
        iteration: 0,
        isl: prev.to_f64_lossy(),
        elapsed_seconds: 0.0,
        bound_m: None,
    }];
    observer(0, stepper.current());

    let mut stop_reason = StopReason::MaxIterations;
    for iteration in 1..=config.max_iterations {
        let bound = stepper.advance()?;
        let curr = stepper.current_isl();
        records.push(TraceRecord {
            iteration,
            isl: curr.to_f64_lossy(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
            bound_m: bound.map(Real::to_f64_lossy),
        });
        observer(iteration, stepper.current());
        if stop_check(prev, curr, tolerance) {
            stop_reason = StopReason::Converged;
            break;
        }
        prev = curr;
    }

    let sequence = stepper.current().clone();
    let profile = autocorrelation_with(plan, &sequence);
    Ok(SolverResult {
        final_isl: isl(&profile),
        final_psl: psl(&profile).unwrap_or(T::zero()),
        degenerate_projections: stepper.degenerate_projections(),
        sequence,
        trace: IterationTrace {
            records,
            stop_reason,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::autocorrelation_fft;
    use crate::sequence::{golomb_sequence, random_sequence};

    #[test]
    fn stop_rule_cases() {
        assert!(stop_check(100.0, 99.999, 1e-5));
        assert!(!stop_check(100.0, 99.99, 1e-5));
        assert!(stop_check(0.5, 0.5 - 4e-6, 1e-5));
        assert!(!stop_check(0.5, 0.5 - 2e-5, 1e-5));
        assert!(stop_check(3.0, 3.0, 1e-12));
    }

    #[test]
    fn config_validation_and_labels() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig::default().with_tolerance(0.0).validate().is_err());
        assert!(SolverConfig::default().with_tolerance(f64::NAN).validate().is_err());
        assert!(SolverConfig::default().with_max_iterations(0).validate().is_err());

        assert_eq!(SolverConfig::fisl(BoundStrategy::Befft).label(), "FISL-BEFFT");
        assert_eq!(SolverConfig::baseline(Algorithm::Misl, true).label(), "ACC-MISL");
        assert_eq!(SolverConfig::baseline(Algorithm::Can, true).label(), "CAN");
        assert!(!SolverConfig::baseline(Algorithm::Can, true).accelerated());

        for a in [Algorithm::Fisl, Algorithm::Can, Algorithm::Misl, Algorithm::IslNew] {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("isl-new".parse::<Algorithm>().unwrap(), Algorithm::IslNew);
    }

    #[test]
    fn solve_entry_points_check_algorithm() {
        let z = golomb_sequence::<f64>(8).unwrap();
        assert!(solve_misl(&z, &SolverConfig::default()).is_err());
        assert!(solve_fisl(&z, &SolverConfig::baseline(Algorithm::Can, false)).is_err());
    }

    #[test]
    fn fisl_improves_random_start() {
        let z0 = random_sequence::<f64>(100, 21).unwrap();
        let start_isl = isl(&autocorrelation_fft(&z0));
        let res = solve_fisl(&z0, &SolverConfig::default()).unwrap();
        assert!(res.final_isl < start_isl);
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        let check = isl(&autocorrelation_fft(&res.sequence));
        assert!((res.final_isl - check).abs() <= 1e-9 * check);
        assert_eq!(res.trace.records[0].iteration, 0);
        assert!((res.trace.records[0].isl - start_isl).abs() <= 1e-9 * start_isl);
    }

    #[test]
    fn refeeding_a_solution_stops_immediately() {
        let z0 = random_sequence::<f64>(64, 3).unwrap();
        let first = solve(&z0, &SolverConfig::default()).unwrap();
        let again = solve(&first.sequence, &SolverConfig::default()).unwrap();
        assert_eq!(again.trace.iterations(), 1);
        assert_eq!(again.trace.stop_reason, StopReason::Converged);
    }

    #[test]
    fn solves_are_deterministic() {
        let z0 = random_sequence::<f64>(50, 8).unwrap();
        for config in [
            SolverConfig::fisl(BoundStrategy::Befft),
            SolverConfig::baseline(Algorithm::Misl, true),
            SolverConfig::baseline(Algorithm::Can, false),
        ] {
            let a = solve(&z0, &config).unwrap();
            let b = solve(&z0, &config).unwrap();
            assert_eq!(a.sequence, b.sequence);
            let strip = |t: &IterationTrace| -> Vec<(usize, f64, Option<f64>)> {
                t.records.iter().map(|r| (r.iteration, r.isl, r.bound_m)).collect()
            };
            assert_eq!(strip(&a.trace), strip(&b.trace));
        }
    }

    #[test]
    fn max_iterations_is_not_an_error() {
        let z0 = random_sequence::<f64>(100, 1).unwrap();
        let res = solve(&z0, &SolverConfig::fisl(BoundStrategy::Tr).with_max_iterations(3)).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::MaxIterations);
        assert_eq!(res.trace.iterations(), 3);
        assert_eq!(res.trace.records.len(), 4);
    }

    #[test]
    fn elapsed_time_is_monotone() {
        let z0 = random_sequence::<f64>(100, 2).unwrap();
        let res = solve(&z0, &SolverConfig::baseline(Algorithm::IslNew, false)).unwrap();
        assert!(res
            .trace
            .records
            .windows(2)
            .all(|w| w[1].elapsed_seconds >= w[0].elapsed_seconds));
    }

    #[test]
    fn single_precision_solve() {
        let z0 = random_sequence::<f32>(64, 4).unwrap();
        let res = solve(&z0, &SolverConfig::default().with_tolerance(1e-4)).unwrap();
        assert!(res.final_isl < isl(&autocorrelation_fft(&z0)));
        assert!(res.sequence.max_modulus_error() <= 1e-5);
    }
}
