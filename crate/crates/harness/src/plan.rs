use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use seqforge::majorizer::BoundStrategy;
use seqforge::sequence::perfect_square_root;
use seqforge::solvers::{Algorithm, SolverConfig, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use seqforge::{frank_sequence, golomb_sequence, random_sequence, Sequence64};

use crate::error::{HarnessError, Result};

pub const FULL_GRID_LENGTHS: [usize; 6] = [100, 225, 400, 625, 900, 1225];
pub const DESK_LENGTHS: [usize; 2] = [100, 225];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initialization {
    Random,
    Golomb,
    Frank,
}

impl Initialization {
    pub const ALL: [Initialization; 3] = [Self::Random, Self::Golomb, Self::Frank];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Golomb => "golomb",
            Self::Frank => "frank",
        }
    }

    /// Golomb and Frank ignore the seed, so they run a single trial.
    pub fn is_deterministic(self) -> bool {
        self != Self::Random
    }

    pub fn generate(self, len: usize, seed: u64) -> Result<Sequence64> {
        Ok(match self {
            Self::Random => random_sequence(len, seed)?,
            Self::Golomb => golomb_sequence(len)?,
            Self::Frank => frank_sequence(len)?,
        })
    }

    pub fn check_length(self, len: usize) -> Result<()> {
        if len == 0 {
            return Err(HarnessError::Plan("sequence length must be positive".into()));
        }
        if self == Self::Frank && perfect_square_root(len).is_none() {
            return Err(HarnessError::Plan(format!(
                "frank initialization needs a perfect-square length, got {len}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Initialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Initialization {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "golomb" => Ok(Self::Golomb),
            "frank" => Ok(Self::Frank),
            other => Err(HarnessError::Plan(format!("unknown initialization `{other}`"))),
        }
    }
}

/// One solver variant of a plan, written as its label in `plan.json`:
/// `FISL-TR`, `FISL-EI`, `FISL-BEI`, `FISL-BEFFT`, `CAN`, `MISL`,
/// `ACC-MISL`, `ISL-NEW` or `ACC-ISL-NEW`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    pub strategy: Option<BoundStrategy>,
    pub accelerate: bool,
}

impl AlgorithmSpec {
    pub fn fisl(strategy: BoundStrategy) -> Self {
        Self {
            algorithm: Algorithm::Fisl,
            strategy: Some(strategy),
            accelerate: false,
        }
    }

    pub fn baseline(algorithm: Algorithm, accelerate: bool) -> Self {
        Self {
            algorithm,
            strategy: None,
            accelerate,
        }
    }

    /// FISL-BEFFT followed by CAN, MISL, ACC-MISL, ISL-NEW and ACC-ISL-NEW.
    pub fn comparison_set() -> Vec<Self> {
        vec![
            Self::fisl(BoundStrategy::Befft),
            Self::baseline(Algorithm::Can, false),
            Self::baseline(Algorithm::Misl, false),
            Self::baseline(Algorithm::Misl, true),
            Self::baseline(Algorithm::IslNew, false),
            Self::baseline(Algorithm::IslNew, true),
        ]
    }

    pub fn config(&self, tolerance: f64, max_iterations: usize) -> SolverConfig {
        let config = match self.strategy {
            Some(strategy) => SolverConfig::fisl(strategy),
            None => SolverConfig::baseline(self.algorithm, self.accelerate),
        };
        config
            .with_tolerance(tolerance)
            .with_max_iterations(max_iterations)
    }

    /// Algorithm column of the flat CSV: `FISL`, `ACC-MISL`, ...
    pub fn algorithm_name(&self) -> String {
        if self.accelerate {
            format!("ACC-{}", self.algorithm)
        } else {
            self.algorithm.to_string()
        }
    }

    /// Strategy column of the flat CSV; `none` outside FISL.
    pub fn strategy_name(&self) -> &'static str {
        self.strategy.map_or("none", BoundStrategy::as_str)
    }

    pub fn label(&self) -> String {
        match self.strategy {
            Some(s) => format!("{}-{s}", self.algorithm),
            None => self.algorithm_name(),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for AlgorithmSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        if let Some(strategy) = upper.strip_prefix("FISL-") {
            let strategy = strategy.parse::<BoundStrategy>()?;
            return Ok(Self::fisl(strategy));
        }
        let (accelerate, rest) = match upper.strip_prefix("ACC-") {
            Some(rest) => (true, rest),
            None => (false, upper.as_str()),
        };
        let algorithm = rest.parse::<Algorithm>()?;
        match algorithm {
            Algorithm::Fisl if !accelerate => Ok(Self::fisl(BoundStrategy::Befft)),
            Algorithm::Misl | Algorithm::IslNew => Ok(Self::baseline(algorithm, accelerate)),
            Algorithm::Can if !accelerate => Ok(Self::baseline(algorithm, false)),
            _ => Err(HarnessError::Plan(format!("`{s}` cannot be accelerated"))),
        }
    }
}

impl TryFrom<String> for AlgorithmSpec {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlgorithmSpec> for String {
    fn from(spec: AlgorithmSpec) -> String {
        spec.label()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub lengths: Vec<usize>,
    pub initializations: Vec<Initialization>,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Monte-Carlo trials for random initialization.
    pub trials: usize,
    pub tolerance: f64,
    pub base_seed: u64,
}

/// One (length, init, trial) cell; every algorithm starts from the same `z0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub length: usize,
    pub init: Initialization,
    pub trial: usize,
    pub seed: u64,
}

impl Cell {
    pub fn stem(&self) -> String {
        format!("P{}_{}_t{}", self.length, self.init, self.trial)
    }
}

impl ExperimentPlan {
    /// The full grid: six lengths, three initializations, 30 trials.
    pub fn full_grid() -> Self {
        Self {
            lengths: FULL_GRID_LENGTHS.to_vec(),
            initializations: Initialization::ALL.to_vec(),
            algorithms: AlgorithmSpec::comparison_set(),
            trials: 30,
            tolerance: DEFAULT_TOLERANCE,
            base_seed: 0,
        }
    }

    /// The grid cut to lengths {100, 225} and 5 trials.
    pub fn desk() -> Self {
        Self {
            lengths: DESK_LENGTHS.to_vec(),
            trials: 5,
            ..Self::full_grid()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() || self.initializations.is_empty() || self.algorithms.is_empty() {
            return Err(HarnessError::Plan(
                "lengths, initializations and algorithms must be non-empty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(HarnessError::Plan("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(HarnessError::Plan(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        for &init in &self.initializations {
            for &len in &self.lengths {
                init.check_length(len)?;
            }
        }
        Ok(())
    }

    /// Trial `t` of a random cell uses seed `base_seed + t`.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &length in &self.lengths {
            for &init in &self.initializations {
                let trials = if init.is_deterministic() { 1 } else { self.trials };
                for trial in 0..trials {
                    cells.push(Cell {
                        length,
                        init,
                        trial,
                        seed: self.trial_seed(trial),
                    });
                }
            }
        }
        cells
    }

    pub fn solver_config(&self, spec: &AlgorithmSpec) -> SolverConfig {
        spec.config(self.tolerance, DEFAULT_MAX_ITERATIONS)
    }
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self::desk()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        let mut all: Vec<_> = BoundStrategy::ALL.into_iter().map(AlgorithmSpec::fisl).collect();
        all.extend(AlgorithmSpec::comparison_set());
        for spec in all {
            assert_eq!(spec.label().parse::<AlgorithmSpec>().unwrap(), spec);
        }
        assert_eq!("acc-isl_new".parse::<AlgorithmSpec>().unwrap().label(), "ACC-ISL-NEW");
        assert!("ACC-CAN".parse::<AlgorithmSpec>().is_err());
        assert!("ACC-FISL".parse::<AlgorithmSpec>().is_err());
        assert!("FISL-XYZ".parse::<AlgorithmSpec>().is_err());
    }

    #[test]
    fn csv_columns() {
        let spec = AlgorithmSpec::baseline(Algorithm::IslNew, true);
        assert_eq!(spec.algorithm_name(), "ACC-ISL-NEW");
        assert_eq!(spec.strategy_name(), "none");
        let spec = AlgorithmSpec::fisl(BoundStrategy::Ei);
        assert_eq!((spec.algorithm_name().as_str(), spec.strategy_name()), ("FISL", "EI"));
    }

    #[test]
    fn json_mirrors_fields() {
        let plan = ExperimentPlan::desk();
        let json = serde_json::to_string(&plan).unwrap();
        assert!(json.contains("\"algorithms\":[\"FISL-BEFFT\",\"CAN\",\"MISL\",\"ACC-MISL\""));
        assert_eq!(ExperimentPlan::from_json(&json).unwrap(), plan);
        assert!(ExperimentPlan::from_json(r#"{"lengths":[4]}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentPlan::full_grid().validate().is_ok());
        let mut plan = ExperimentPlan::desk();
        plan.lengths = vec![10];
        assert!(matches!(plan.validate(), Err(HarnessError::Plan(_))));
        plan.initializations = vec![Initialization::Random];
        assert!(plan.validate().is_ok());
        plan.trials = 0;
        assert!(plan.validate().is_err());
        plan.trials = 1;
        plan.tolerance = -1.0;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn seed_fan_out() {
        let plan = ExperimentPlan {
            lengths: vec![16],
            initializations: vec![Initialization::Random, Initialization::Golomb],
            algorithms: vec![AlgorithmSpec::fisl(BoundStrategy::Befft)],
            trials: 2,
            tolerance: 1e-5,
            base_seed: 10,
        };
        let cells = plan.cells();
        let seeds: Vec<_> = cells.iter().map(|c| (c.init, c.trial, c.seed)).collect();
        assert_eq!(
            seeds,
            vec![
                (Initialization::Random, 0, 10),
                (Initialization::Random, 1, 11),
                (Initialization::Golomb, 0, 10),
            ]
        );
        assert_eq!(cells[1].stem(), "P16_random_t1");
    }
}
