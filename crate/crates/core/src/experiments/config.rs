use serde::{Deserialize, Serialize};

use crate::base::BaseMeasure;
use crate::crm::TruncationSpec;
use crate::error::{Error, Result};
use crate::levy::LevyFamily;
use crate::measure::Partition;

/// Cut points of the three-set partition used throughout the illustrations.
pub const DEFAULT_CUTS: [f64; 4] = [0.0, 0.3, 0.7, 1.0];
pub const FIGURE1_COEFFICIENTS: [f64; 3] = [1.6, 1.49, 0.50];
pub const FIGURE1_A: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 30.0];
pub const FIGURE1_REPLICATES: usize = 3000;
pub const DEFAULT_TRUNCATION: usize = 3000;
/// Fewest replicates accepted when a config carries assertions.
pub const MIN_ASSERTED_REPLICATES: usize = 100;

fn default_truncation() -> TruncationSpec {
    TruncationSpec::fixed(DEFAULT_TRUNCATION)
}

fn one() -> usize {
    1
}

/// A pass/fail condition on aggregate rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    /// `min ≤ value ≤ max` for every aggregate row of `statistic`
    /// (restricted to one `a` when given).
    Range {
        statistic: String,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        min: Option<f64>,
        #[serde(default)]
        max: Option<f64>,
    },
    /// Aggregate `statistic` is strictly decreasing along `a_list`.
    Decreasing { statistic: String },
    /// Aggregate `statistic` is strictly below aggregate `bound` at every `a`.
    Below { statistic: String, bound: String },
}

/// Everything needed to rerun an experiment bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: LevyFamily,
    pub a_list: Vec<f64>,
    pub replicates: usize,
    #[serde(default = "default_truncation")]
    pub truncation: TruncationSpec,
    #[serde(default)]
    pub base: BaseMeasure,
    /// Partition cut points for set-based suites.
    #[serde(default)]
    pub cuts: Option<Vec<f64>>,
    /// Evaluation grid (points of the support, or levels in (0,1) for the
    /// quantile suite).
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    /// Linear combinations of the partition statistics.
    #[serde(default)]
    pub coefficients: Vec<Vec<f64>>,
    pub seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

impl ExperimentConfig {
    pub fn new(family: LevyFamily, a_list: Vec<f64>, replicates: usize, seed: u64) -> Self {
        ExperimentConfig {
            family,
            a_list,
            replicates,
            truncation: default_truncation(),
            base: BaseMeasure::UniformOn01,
            cuts: None,
            grid: None,
            coefficients: Vec::new(),
            seed,
            workers: 1,
            assertions: Vec::new(),
        }
    }

    /// The illustration protocol: three-set partition, the fixed linear
    /// combination, five values of `a`, 3000 replicates and 3000 jumps.
    pub fn figure1(family: LevyFamily, seed: u64) -> Self {
        ExperimentConfig {
            cuts: Some(DEFAULT_CUTS.to_vec()),
            coefficients: vec![FIGURE1_COEFFICIENTS.to_vec()],
            ..Self::new(family, FIGURE1_A.to_vec(), FIGURE1_REPLICATES, seed)
        }
    }

    pub fn with_truncation(mut self, t: TruncationSpec) -> Self {
        self.truncation = t;
        self
    }

    pub fn with_base(mut self, base: BaseMeasure) -> Self {
        self.base = base;
        self
    }

    pub fn with_cuts(mut self, cuts: Vec<f64>) -> Self {
        self.cuts = Some(cuts);
        self
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_coefficients(mut self, c: Vec<Vec<f64>>) -> Self {
        self.coefficients = c;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_assertions(mut self, a: Vec<Assertion>) -> Self {
        self.assertions = a;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks shared by all suites.
    pub fn check(&self) -> Result<()> {
        if self.a_list.is_empty() {
            return Err(Error::config("a_list must not be empty"));
        }
        if let Some(a) = self.a_list.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::config(format!("every a must be finite and positive, got {a}")));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates must be at least 1"));
        }
        if !self.assertions.is_empty() && self.replicates < MIN_ASSERTED_REPLICATES {
            return Err(Error::config(format!(
                "statistical assertions need at least {MIN_ASSERTED_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        self.truncation.check().map_err(|e| Error::config(e.to_string()))?;
        Ok(())
    }

    /// Partition from `cuts` (default three sets), requiring `H(A_i) ∈ (0,1)`.
    pub fn partition(&self) -> Result<Partition> {
        let cuts = self.cuts.clone().unwrap_or_else(|| DEFAULT_CUTS.to_vec());
        let part = Partition::from_cuts(&cuts, &self.base).map_err(|e| Error::config(e.to_string()))?;
        if let Some(h) = part.h_values().iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return Err(Error::config(format!(
                "every partition set needs base mass in (0,1), got {h}; drop such sets"
            )));
        }
        for c in &self.coefficients {
            if c.len() != part.len() {
                return Err(Error::config(format!(
                    "coefficient vector has length {}, partition has {} sets",
                    c.len(),
                    part.len()
                )));
            }
        }
        Ok(part)
    }
}
