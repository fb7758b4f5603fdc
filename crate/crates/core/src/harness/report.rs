use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{ExperimentConfig, HarnessError, Histogram, Outcome, Statistic};
use crate::ff::FieldSpec;
use crate::theorydist::{total_dist, Pmf, Rational, TheoremParams};
use crate::ExactDist;

/// The limiting law of the configured statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoryLaw {
    Scalar(ExactDist),
    /// i.i.d. copies of `site`, one per point of `F_q`.
    Product { site: ExactDist, sites: u32 },
}

impl TheoryLaw {
    pub fn for_config(config: &ExperimentConfig) -> Result<TheoryLaw, HarnessError> {
        let q = config.q();
        let site: ExactDist = TheoremParams::new(q, config.m, config.n, config.variant)?.distribution();
        Ok(match config.statistic {
            Statistic::Total => TheoryLaw::Scalar(total_dist(&site, q)),
            Statistic::Marginal { .. } => TheoryLaw::Scalar(site),
            Statistic::Joint => TheoryLaw::Product { site, sites: q },
        })
    }

    pub fn prob(&self, outcome: &Outcome) -> Rational {
        match (self, outcome) {
            (TheoryLaw::Scalar(x), Outcome::Scalar(k)) => x.mass(*k),
            (TheoryLaw::Product { site, sites }, Outcome::Vector(v)) if v.len() == *sites as usize => {
                v.iter().map(|&c| site.mass(c as u64)).product()
            }
            _ => Rational::zero(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        match self {
            TheoryLaw::Scalar(x) => x.total_mass(),
            TheoryLaw::Product { site, sites } => site.total_mass().pow(*sites as i32),
        }
    }

    pub fn mean(&self) -> Rational {
        match self {
            TheoryLaw::Scalar(x) => x.mean(),
            TheoryLaw::Product { site, sites } => site.mean() * Rational::from_integer(BigInt::from(*sites)),
        }
    }

    /// Full support for scalar laws; observed outcomes only for products.
    pub fn listing(&self, hist: &Histogram) -> Vec<(Outcome, Rational)> {
        match self {
            TheoryLaw::Scalar(x) => x.iter().map(|(k, p)| (Outcome::Scalar(k), p.clone())).collect(),
            TheoryLaw::Product { .. } => hist.iter().map(|(o, _)| (o.clone(), self.prob(o))).collect(),
        }
    }
}

fn frequency(count: u64, trials: u64) -> Rational {
    Rational::new(BigInt::from(count), BigInt::from(trials))
}

/// Half the l1 distance between the normalized histogram and the law, over
/// the union of supports. Unobserved theory mass is taken in bulk.
pub(crate) fn tv_against(hist: &Histogram, law: &TheoryLaw) -> Result<Rational, HarnessError> {
    if hist.is_empty() {
        return Err(HarnessError::EmptyHistogram);
    }
    let mut sum = Rational::zero();
    let mut covered = Rational::zero();
    for (o, c) in hist.iter() {
        let th = law.prob(o);
        sum += (frequency(c, hist.trials()) - &th).abs();
        covered += th;
    }
    sum += law.total_mass() - covered;
    Ok(sum / Rational::from_integer(BigInt::from(2)))
}

/// Total variation between a histogram of scalar outcomes and a law.
pub fn exact_tv(hist: &Histogram, theory: &ExactDist) -> Result<TvValue, HarnessError> {
    tv_against(hist, &TheoryLaw::Scalar(theory.clone())).map(|r| TvValue::from(&r))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub k: u32,
    pub modulus: String,
}

impl FieldInfo {
    pub fn of(field: &FieldSpec) -> FieldInfo {
        FieldInfo { p: field.p(), k: field.k(), modulus: field.modulus_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalValue {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalValue {
    fn from(r: &Rational) -> RationalValue {
        RationalValue { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl RationalValue {
    pub fn to_rational(&self) -> Rational {
        let num: BigInt = self.num.parse().expect("decimal numerator");
        let den: BigInt = self.den.parse().expect("decimal denominator");
        Rational::new(num, den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvValue {
    pub num: String,
    pub den: String,
    pub float: f64,
}

impl From<&Rational> for TvValue {
    fn from(r: &Rational) -> TvValue {
        TvValue {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            float: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl TvValue {
    pub fn to_rational(&self) -> Rational {
        RationalValue { num: self.num.clone(), den: self.den.clone() }.to_rational()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramEntry {
    pub outcome: Outcome,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedOutcome {
    pub outcome: Outcome,
    pub num: String,
    pub den: String,
}

impl WeightedOutcome {
    fn new(outcome: Outcome, r: &Rational) -> WeightedOutcome {
        WeightedOutcome { outcome, num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplingStats {
    pub generator: String,
    pub shard_size: u64,
    pub draws: u64,
    pub power_free: u64,
    pub accepted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub field: FieldInfo,
    pub seed: u64,
    pub trials: u64,
    pub histogram: Vec<HistogramEntry>,
    pub empirical: Vec<WeightedOutcome>,
    pub theory: Vec<WeightedOutcome>,
    pub tv: TvValue,
    pub mean: RationalValue,
    pub theory_mean: RationalValue,
    /// Admitted `f` whose curve is geometrically reducible; normalization
    /// counts for these use the local rule formally.
    pub geometrically_reducible: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingStats>,
    pub runtime_ms: u64,
    pub version: String,
    #[serde(skip)]
    pub raw: Histogram,
}

impl ExperimentReport {
    pub(crate) fn build(
        config: &ExperimentConfig,
        field: &FieldSpec,
        hist: Histogram,
        geometrically_reducible: u64,
        sampling: Option<SamplingStats>,
        runtime_ms: u64,
    ) -> Result<ExperimentReport, HarnessError> {
        let law = TheoryLaw::for_config(config)?;
        let tv = tv_against(&hist, &law)?;
        let trials = hist.trials();
        let total: u64 = hist.iter().map(|(o, c)| o.total() * c).sum();
        Ok(ExperimentReport {
            config: config.clone(),
            field: FieldInfo::of(field),
            seed: config.seed,
            trials,
            histogram: hist.iter().map(|(o, c)| HistogramEntry { outcome: o.clone(), count: c }).collect(),
            empirical: hist
                .iter()
                .map(|(o, c)| WeightedOutcome::new(o.clone(), &frequency(c, trials)))
                .collect(),
            theory: law.listing(&hist).into_iter().map(|(o, p)| WeightedOutcome::new(o, &p)).collect(),
            tv: TvValue::from(&tv),
            mean: RationalValue::from(&frequency(total, trials)),
            theory_mean: RationalValue::from(&law.mean()),
            geometrically_reducible,
            sampling,
            runtime_ms,
            version: super::VERSION.to_string(),
            raw: hist,
        })
    }

    pub fn tv_rational(&self) -> Rational {
        self.tv.to_rational()
    }

    pub fn histogram(&self) -> &Histogram {
        &self.raw
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON report without `runtime_ms`, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut v = self.to_json();
        v.as_object_mut().expect("report is an object").remove("runtime_ms");
        serde_json::to_string(&v).expect("value serializes")
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let empirical: Vec<(Outcome, Rational)> = self
            .empirical
            .iter()
            .map(|w| (w.outcome.clone(), RationalValue { num: w.num.clone(), den: w.den.clone() }.to_rational()))
            .collect();
        let theory: Vec<(Outcome, Rational)> = self
            .theory
            .iter()
            .map(|w| (w.outcome.clone(), RationalValue { num: w.num.clone(), den: w.den.clone() }.to_rational()))
            .collect();
        let mut outcomes: Vec<Outcome> = empirical.iter().chain(&theory).map(|(o, _)| o.clone()).collect();
        outcomes.sort();
        outcomes.dedup();
        let lookup = |table: &[(Outcome, Rational)], o: &Outcome| {
            table.iter().find(|(k, _)| k == o).map(|(_, r)| r.clone()).unwrap_or_else(Rational::zero)
        };
        outcomes
            .into_iter()
            .map(|o| CsvRow {
                count: self.raw.count(&o),
                empirical: lookup(&empirical, &o),
                theory: lookup(&theory, &o),
                outcome: o,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        csv_histogram(&self.csv_rows())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub outcome: Outcome,
    pub count: u64,
    pub empirical: Rational,
    pub theory: Rational,
}

/// `r` rounded half-up to 12 decimal places; `r >= 0`.
pub fn decimal_12(r: &Rational) -> String {
    let scale = BigInt::from(10u64).pow(12);
    let two = BigInt::from(2);
    let scaled = (r.numer() * &scale * &two + r.denom()).div_floor(&(r.denom() * &two));
    let (int, frac) = scaled.div_rem(&scale);
    format!("{int}.{:0>12}", frac.to_string())
}

pub fn csv_histogram(rows: &[CsvRow]) -> String {
    let mut out = String::from("outcome,count,empirical,theory\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.outcome.label(),
            row.count,
            decimal_12(&row.empirical),
            decimal_12(&row.theory)
        ));
    }
    out
}

impl Pmf<Rational> {
    /// Histogram-shaped view of a law, for CSV export of theory tables.
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.iter()
            .map(|(k, p)| CsvRow { outcome: Outcome::Scalar(k), count: 0, empirical: Rational::zero(), theory: p.clone() })
            .collect()
    }
}
