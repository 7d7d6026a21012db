//! Experiment plans, paired multi-algorithm runs and result export for
//! seqforge.

pub mod bounds;
pub mod compare;
pub mod error;
pub mod plan;
pub mod report;
pub mod runner;

pub use bounds::{bounds_csv, bounds_report, BoundRow};
pub use compare::{compare_algorithms, compare_strategies, Comparison, ComparisonRow};
pub use error::{HarnessError, Result};
pub use plan::{AlgorithmSpec, Cell, ExperimentPlan, Initialization};
pub use report::{export_summary, summary_csv, ExperimentReport, RunRecord};
pub use runner::{max_reload_error, run_plan};
