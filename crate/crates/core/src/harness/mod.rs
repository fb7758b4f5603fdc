//! Experiments over `F_q[x]_d`: exhaustive and Monte Carlo scans compared
//! against the limiting laws, exact checks of the counting lemmas, the
//! local branch-count sweep, and JSON/CSV report emission.

mod observe;
mod report;
mod scan;
mod verify;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvemodel::CurveError;
use crate::ff::{make_field, FieldError, FieldSpec};
use crate::polyring::{degree_count, PolyError, DEFAULT_ENUMERATION_BUDGET};
use crate::theorydist::{TheoryError, Variant};

pub use observe::{Observation, SiteObserver};
pub use report::{
    csv_histogram, decimal_12, exact_tv, CsvRow, ExperimentReport, FieldInfo, RationalValue, SamplingStats,
    TheoryLaw, TvValue, WeightedOutcome,
};
pub use scan::{run, run_exhaustive, run_montecarlo, MC_SHARD_SIZE, REJECTION_CAP};
pub use verify::{
    convergence_scan, verify_counting_lemmas, verify_local_lemma, ConvergenceReport, ConvergenceRow,
    CountingCase, CountingReport, InterpolationCase, InterpolationSpec, LocalCase, LocalLemmaReport,
    DEFAULT_INTERPOLATION_CONSTANT,
};

/// Environment variable overriding the default enumeration budget.
pub const BUDGET_ENV: &str = "SUPERELL_BUDGET";

/// Name of the PRNG recorded in Monte Carlo reports.
pub const GENERATOR_NAME: &str = "ChaCha8Rng";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("exhaustive scan needs {count} polynomials, budget is {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("q = {q} and m = {m} are not coprime")]
    NotCoprime { q: u32, m: u32 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no admissible polynomial after {cap} consecutive draws")]
    NoAcceptance { cap: u64 },
    #[error("empty histogram")]
    EmptyHistogram,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Default budget, overridden by `SUPERELL_BUDGET` when it parses.
pub fn default_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

/// Per-polynomial quantity accumulated into the histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Sum of the per-x counts over all of `F_q`.
    Total,
    /// The vector of per-x counts, `x` in canonical element order.
    Joint,
    /// The count over the single point with canonical value `x`.
    Marginal { x: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    All,
    GeometricallyIrreducible,
    Irreducible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: u32,
    pub k: u32,
    pub m: u32,
    pub n: u32,
    pub variant: Variant,
    pub statistic: Statistic,
    pub d: u32,
    pub mode: Mode,
    pub samples: u64,
    pub seed: u64,
    pub filter: Filter,
    #[serde(with = "u128_string")]
    pub budget: u128,
    /// Worker threads, 0 for the rayon default. Never part of a report.
    #[serde(skip)]
    pub threads: usize,
}

mod u128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    /// Exhaustive total-count scan over all admitted `f`, default budget.
    pub fn new(p: u32, k: u32, m: u32, n: u32, variant: Variant, d: u32) -> ExperimentConfig {
        ExperimentConfig {
            p,
            k,
            m,
            n,
            variant,
            statistic: Statistic::Total,
            d,
            mode: Mode::Exhaustive,
            samples: 0,
            seed: 0,
            filter: Filter::All,
            budget: default_budget(),
            threads: 0,
        }
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.k)
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = statistic;
        self
    }

    pub fn with_filter(mut self, filter: Filter) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn montecarlo(mut self, samples: u64, seed: u64) -> Self {
        self.mode = Mode::Montecarlo;
        self.samples = samples;
        self.seed = seed;
        self
    }

    /// Checks the invariants and builds the field.
    pub fn validate(&self) -> Result<Arc<FieldSpec>, HarnessError> {
        let field = Arc::new(make_field(self.p as u64, self.k)?);
        let q = field.q();
        if self.m < 2 {
            return Err(HarnessError::InvalidConfig(format!("m = {} must be at least 2", self.m)));
        }
        if self.d == 0 {
            return Err(HarnessError::InvalidConfig("degree d must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(HarnessError::InvalidConfig(format!("n = {} must be at least 2", self.n)));
        }
        if q.gcd(&self.m) != 1 {
            return Err(HarnessError::NotCoprime { q, m: self.m });
        }
        if let Statistic::Marginal { x } = self.statistic {
            if x >= q {
                return Err(HarnessError::InvalidConfig(format!("marginal point {x} is not in F_{q}")));
            }
        }
        match self.mode {
            Mode::Exhaustive => {
                let count = degree_count(q, self.d as usize);
                if count > self.budget {
                    return Err(HarnessError::BudgetExceeded { count, budget: self.budget });
                }
            }
            Mode::Montecarlo => {
                if self.samples == 0 {
                    return Err(HarnessError::InvalidConfig("montecarlo needs at least one sample".into()));
                }
            }
        }
        Ok(field)
    }
}

/// A histogram key: a scalar count or a per-x count vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Scalar(u64),
    Vector(Vec<u32>),
}

impl Outcome {
    /// The scalar value, or the component sum of a vector.
    pub fn total(&self) -> u64 {
        match self {
            Outcome::Scalar(v) => *v,
            Outcome::Vector(v) => v.iter().map(|&c| c as u64).sum(),
        }
    }

    /// CSV-safe rendering: vectors joined by `;`.
    pub fn label(&self) -> String {
        match self {
            Outcome::Scalar(v) => v.to_string(),
            Outcome::Vector(v) => v.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Occurrence counts; `trials` always equals the sum of the counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Histogram {
    counts: BTreeMap<Outcome, u64>,
    trials: u64,
}

impl Histogram {
    pub fn new() -> Histogram {
        Histogram::default()
    }

    pub fn record(&mut self, outcome: Outcome) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.trials += 1;
    }

    pub fn merge(mut self, other: Histogram) -> Histogram {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.trials += other.trials;
        self
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, outcome: &Outcome) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, u64)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.trials == 0
    }
}
