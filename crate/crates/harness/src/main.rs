use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seqforge::io::{format_sequence, format_trace, read_sequence};
use seqforge::majorizer::BoundStrategy;
use seqforge::metrics::{autocorrelation_fft, profile_csv};
use seqforge::solvers::{solve, Algorithm, SolverConfig, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use seqforge::Sequence64;
use seqforge_harness::error::{HarnessError, Result};
use seqforge_harness::runner::ensure_writable;
use seqforge_harness::{bounds_csv, bounds_report, compare_algorithms, compare_strategies, run_plan};
use seqforge_harness::{Comparison, ExperimentPlan, Initialization};

#[derive(Parser)]
#[command(name = "seqforge", version, about = "Unimodular sequence design by ISL minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Random,
    Golomb,
    Frank,
}

impl From<InitArg> for Initialization {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Random => Initialization::Random,
            InitArg::Golomb => Initialization::Golomb,
            InitArg::Frank => Initialization::Frank,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Fisl,
    Can,
    Misl,
    Islnew,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Fisl => Algorithm::Fisl,
            AlgoArg::Can => Algorithm::Can,
            AlgoArg::Misl => Algorithm::Misl,
            AlgoArg::Islnew => Algorithm::IslNew,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Tr,
    Ei,
    Bei,
    Befft,
}

impl From<StrategyArg> for BoundStrategy {
    fn from(a: StrategyArg) -> Self {
        match a {
            StrategyArg::Tr => BoundStrategy::Tr,
            StrategyArg::Ei => BoundStrategy::Ei,
            StrategyArg::Bei => BoundStrategy::Bei,
            StrategyArg::Befft => BoundStrategy::Befft,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design one sequence and write it with its trace and autocorrelation.
    Design {
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum, default_value = "random")]
        init: InitArg,
        #[arg(long, value_enum, default_value = "fisl")]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value = "befft")]
        strategy: StrategyArg,
        /// SQUAREM acceleration (MISL and ISL-NEW only).
        #[arg(long)]
        accel: bool,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment plan.
    Bench {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// FISL under all four bound strategies from one initialization.
    CompareStrategies {
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum)]
        init: InitArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// FISL against CAN, MISL and ISL-NEW (plain and accelerated).
    CompareAlgos {
        #[arg(long)]
        length: usize,
        #[arg(long, value_enum)]
        init: InitArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every majorizer constant for a sequence file.
    Bounds {
        #[arg(long)]
        sequence: PathBuf,
    },
}

fn write(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn print_comparison(c: &Comparison) {
    print!("{}", c.csv());
    println!(
        "# final ISL spread {:.4}% ({}within {:.0}%)",
        100.0 * c.spread,
        if c.agrees { "" } else { "NOT " },
        100.0 * c.threshold
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Design {
            length,
            init,
            algo,
            strategy,
            accel,
            tol,
            max_iter,
            seed,
            out,
        } => {
            let init = Initialization::from(init);
            init.check_length(length)?;
            ensure_writable(&out)?;
            let z0 = init.generate(length, seed)?;
            let algorithm = Algorithm::from(algo);
            let config = SolverConfig {
                algorithm,
                bound_strategy: strategy.into(),
                accelerate: accel,
                tolerance: tol,
                max_iterations: max_iter,
                seed,
            };
            if accel && !config.accelerated() {
                log::warn!("--accel only applies to misl and islnew; ignored for {algorithm}");
            }
            let result = solve(&z0, &config)?;
            write(&out.join("init.txt"), format_sequence(&z0))?;
            write(&out.join("sequence.txt"), format_sequence(&result.sequence))?;
            write(&out.join("trace.csv"), format_trace(&result.trace))?;
            write(&out.join("acf.csv"), profile_csv(&autocorrelation_fft(&result.sequence))?)?;
            println!(
                "{} P={} iterations={} final_isl={:e} final_psl={:e} stop_reason={} wall_seconds={:.6}",
                config.label(),
                length,
                result.trace.iterations(),
                result.final_isl,
                result.final_psl,
                result.trace.stop_reason,
                result.trace.elapsed_seconds()
            );
        }
        Command::Bench { plan, out, workers } => {
            let text = fs::read_to_string(&plan).map_err(|source| HarnessError::Io { path: plan, source })?;
            let plan = ExperimentPlan::from_json(&text)?;
            let report = run_plan(&plan, &out, workers)?;
            println!(
                "{} runs written to {}",
                report.records.len(),
                out.join(seqforge_harness::runner::SUMMARY_JSON).display()
            );
        }
        Command::CompareStrategies {
            length,
            init,
            seed,
            tol,
            out,
        } => {
            let c = compare_strategies(length, init.into(), seed, tol)?;
            c.write(&out)?;
            print_comparison(&c);
        }
        Command::CompareAlgos {
            length,
            init,
            seed,
            tol,
            out,
        } => {
            let c = compare_algorithms(length, init.into(), seed, tol)?;
            c.write(&out)?;
            print_comparison(&c);
        }
        Command::Bounds { sequence } => {
            let z: Sequence64 = read_sequence(&sequence)?;
            print!("{}", bounds_csv(&bounds_report(&z)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
