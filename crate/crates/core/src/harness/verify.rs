use std::ops::RangeInclusive;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::report::{RationalValue, TvValue};
use super::scan::{with_threads, EXHAUSTIVE_CHUNK};
use super::{ExperimentConfig, HarnessError, VERSION};
use crate::curvemodel::{branch_degree, SuperellipticModel};
use crate::ff::{make_field, FieldElement as Fe, FieldSpec};
use crate::polyring::enumerate::{advance, coeffs_at};
use crate::polyring::{count_nth_power_free, degree_count, kernel, MultiplicityEngine, Poly};
use crate::theorydist::{interpolation_main_term, Rational};

/// Default `C` in `|count - main term| <= C q^{d/n + 1}`.
pub const DEFAULT_INTERPOLATION_CONSTANT: f64 = 4.0;

/// Interpolation cases need a value-vector table of `q^q` cells.
const VALUE_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationSpec {
    /// Numbers of prescribed points.
    pub ls: Vec<u32>,
    pub tuples_per_case: usize,
    pub constant: f64,
    pub seed: u64,
}

impl Default for InterpolationSpec {
    fn default() -> Self {
        InterpolationSpec { ls: vec![1, 2, 3], tuples_per_case: 20, constant: DEFAULT_INTERPOLATION_CONSTANT, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingCase {
    pub q: u32,
    pub n: u32,
    pub d: u32,
    pub count: u64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationCase {
    pub q: u32,
    pub n: u32,
    pub d: u32,
    pub l: u32,
    pub xs: Vec<u32>,
    pub values: Vec<u32>,
    pub count: u64,
    pub main_term: RationalValue,
    pub main_term_float: f64,
    /// `C q^{d/n + 1}`.
    pub bound: f64,
    /// `|count - main term| / q^{d/n + 1}`.
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingReport {
    pub exact: Vec<CountingCase>,
    pub interpolation: Vec<InterpolationCase>,
    /// `(q, d)` pairs over budget, and `q` too large for interpolation tables.
    pub skipped: Vec<String>,
    pub constant: f64,
    pub max_ratio: Option<f64>,
    pub passed: bool,
    pub runtime_ms: u64,
    pub version: String,
}

/// Per-degree scan data: admitted counts by max multiplicity, and for each
/// `n` the number of n-th power-free `f` with each value vector.
#[derive(Debug, Clone, Default)]
struct DegreeTally {
    by_multiplicity: Vec<u64>,
    values: Vec<Vec<u64>>,
}

impl DegreeTally {
    fn merge(mut self, other: DegreeTally) -> DegreeTally {
        if self.by_multiplicity.is_empty() {
            return other;
        }
        for (a, b) in self.by_multiplicity.iter_mut().zip(other.by_multiplicity) {
            *a += b;
        }
        for (va, vb) in self.values.iter_mut().zip(other.values) {
            for (a, b) in va.iter_mut().zip(vb) {
                *a += b;
            }
        }
        self
    }
}

fn degree_tally(field: &Arc<FieldSpec>, d: usize, ns: &[u32], with_values: bool) -> DegreeTally {
    let q = field.q();
    let engine = MultiplicityEngine::new(field.clone());
    let count = degree_count(q, d);
    let cells = if with_values { (q as usize).pow(q) } else { 0 };
    let chunks = count.div_ceil(EXHAUSTIVE_CHUNK) as usize;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * EXHAUSTIVE_CHUNK;
            let end = (start + EXHAUSTIVE_CHUNK).min(count);
            let mut t = DegreeTally { by_multiplicity: vec![0; d + 2], values: vec![vec![0; cells]; ns.len()] };
            let mut coeffs = coeffs_at(q, d, start);
            for i in start..end {
                let mult = engine.max_multiplicity(&coeffs);
                t.by_multiplicity[mult as usize] += 1;
                if with_values {
                    let cell = (0..q)
                        .rev()
                        .fold(0usize, |acc, x| acc * q as usize + kernel::eval(field, &coeffs, Fe(x)).0 as usize);
                    for (j, &n) in ns.iter().enumerate() {
                        if mult < n {
                            t.values[j][cell] += 1;
                        }
                    }
                }
                if i + 1 < end {
                    advance(q, &mut coeffs);
                }
            }
            t
        })
        .reduce(DegreeTally::default, DegreeTally::merge)
}

/// Exact power-free counts against the closed form for each field, `n` and
/// `d` within budget, plus (optionally) the interpolation envelope on
/// sampled point/value tuples.
pub fn verify_counting_lemmas(
    fields: &[(u32, u32)],
    ns: &[u32],
    ds: RangeInclusive<u32>,
    budget: u128,
    interpolation: Option<&InterpolationSpec>,
    threads: usize,
) -> Result<CountingReport, HarnessError> {
    let start = Instant::now();
    let mut exact = Vec::new();
    let mut interp = Vec::new();
    let mut skipped = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(interpolation.map_or(0, |s| s.seed));
    for &(p, k) in fields {
        let field = Arc::new(make_field(p as u64, k)?);
        let q = field.q();
        let with_values = interpolation.is_some() && (q as u64).pow(q) <= VALUE_TABLE_LIMIT;
        if interpolation.is_some() && !with_values {
            skipped.push(format!("interpolation q={q}: value table too large"));
        }
        for d in ds.clone() {
            let count = degree_count(q, d as usize);
            if count > budget {
                skipped.push(format!("q={q} d={d}: {count} polynomials over budget {budget}"));
                continue;
            }
            let tally = with_threads(threads, || degree_tally(&field, d as usize, ns, with_values))?;
            for (j, &n) in ns.iter().enumerate() {
                let got: u64 = tally.by_multiplicity[..(n as usize).min(tally.by_multiplicity.len())].iter().sum();
                let expected = count_nth_power_free(q as u64, n, d);
                exact.push(CountingCase {
                    q,
                    n,
                    d,
                    count: got,
                    expected: expected.to_string(),
                    pass: BigInt::from(got) == expected,
                });
                if let (Some(spec), true) = (interpolation, with_values) {
                    for &l in spec.ls.iter().filter(|&&l| l <= q) {
                        for _ in 0..spec.tuples_per_case {
                            interp.push(interpolation_case(&tally.values[j], q, n, d, l, spec.constant, &mut rng));
                        }
                    }
                }
            }
        }
    }
    let max_ratio = interp.iter().map(|c| c.ratio).fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let passed = exact.iter().all(|c| c.pass) && interp.iter().all(|c| c.pass);
    Ok(CountingReport {
        exact,
        interpolation: interp,
        skipped,
        constant: interpolation.map_or(DEFAULT_INTERPOLATION_CONSTANT, |s| s.constant),
        max_ratio,
        passed,
        runtime_ms: start.elapsed().as_millis() as u64,
        version: VERSION.to_string(),
    })
}

fn interpolation_case(
    values: &[u64],
    q: u32,
    n: u32,
    d: u32,
    l: u32,
    constant: f64,
    rng: &mut ChaCha8Rng,
) -> InterpolationCase {
    let mut xs: Vec<u32> = sample(rng, q as usize, l as usize).into_iter().map(|x| x as u32).collect();
    xs.sort_unstable();
    let targets: Vec<u32> = xs.iter().map(|_| rng.gen_range(1..q)).collect();
    let q_us = q as usize;
    let count: u64 = values
        .iter()
        .enumerate()
        .filter(|&(cell, _)| {
            xs.iter()
                .zip(&targets)
                .all(|(&x, &a)| (cell / q_us.pow(x)) % q_us == a as usize)
        })
        .map(|(_, &c)| c)
        .sum();
    let main: Rational = interpolation_main_term(q, n, d, l);
    let err = (Rational::from_integer(BigInt::from(count)) - &main).abs();
    let scale = (q as f64).powf(d as f64 / n as f64 + 1.0);
    let ratio = err.to_f64().unwrap_or(f64::INFINITY) / scale;
    InterpolationCase {
        q,
        n,
        d,
        l,
        xs,
        values: targets,
        count,
        main_term: RationalValue::from(&main),
        main_term_float: main.to_f64().unwrap_or(f64::NAN),
        bound: constant * scale,
        ratio,
        pass: ratio <= constant,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalCase {
    pub q: u32,
    pub m: u32,
    pub s: u32,
    pub a: u32,
    /// `f = x^s (c x + a)`.
    pub c: u32,
    pub normalization: Option<u32>,
    pub orbit: Option<u32>,
    pub closed_form: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalLemmaReport {
    pub cases: Vec<LocalCase>,
    pub failures: usize,
    pub passed: bool,
    pub runtime_ms: u64,
    pub version: String,
}

fn local_case(field: &Arc<FieldSpec>, m: u32, s: u32, a: Fe, bound: u128) -> Result<LocalCase, HarnessError> {
    let q = field.q();
    let mut xs = vec![Fe::ZERO; s as usize];
    xs.push(Fe::ONE);
    let x_pow = Poly::new(field.clone(), xs)?;
    let mut chosen = None;
    for c in field.nonzero_elements() {
        let f = x_pow.checked_mul(&Poly::new(field.clone(), vec![a, c])?)?;
        if f.bar_power()?.gcd(&m) == 1 {
            chosen = Some((c, f));
            break;
        }
    }
    let (c, f) = chosen.expect("a linear cofactor makes bar_power 1");
    let model = SuperellipticModel::new(m, f)?;

    let e = branch_degree(m, s);
    let closed_form = if field.is_rth_power(a, e as u64)? { e.gcd(&(q - 1)) } else { 0 };

    let normalization = model.normalization_count_at(Fe::ZERO);
    let orbit = model.branch_orbit_count(Fe::ZERO, bound);
    let error = match (&normalization, &orbit) {
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        _ => None,
    };
    let normalization = normalization.ok();
    let orbit = orbit.ok();
    let pass = normalization == Some(closed_form) && orbit == Some(closed_form);
    Ok(LocalCase { q, m, s, a: a.value(), c: c.value(), normalization, orbit, closed_form, error, pass })
}

/// Compares the local rule, the splitting-field orbit count and the closed
/// form at `x = 0` for `f = x^s (c x + a)`, every `a` in `F_q^*`.
pub fn verify_local_lemma(
    fields: &[(u32, u32)],
    ms: RangeInclusive<u32>,
    ss: RangeInclusive<u32>,
    bound: u128,
) -> Result<LocalLemmaReport, HarnessError> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for &(p, k) in fields {
        let field = Arc::new(make_field(p as u64, k)?);
        let q = field.q();
        for m in ms.clone().filter(|m| *m >= 2 && m.gcd(&q) == 1) {
            for s in ss.clone() {
                for a in field.nonzero_elements() {
                    cases.push(local_case(&field, m, s, a, bound)?);
                }
            }
        }
    }
    let failures = cases.iter().filter(|c| !c.pass).count();
    Ok(LocalLemmaReport {
        cases,
        failures,
        passed: failures == 0,
        runtime_ms: start.elapsed().as_millis() as u64,
        version: VERSION.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub d: u32,
    pub trials: u64,
    pub tv: TvValue,
    pub geometrically_reducible: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ConvergenceRow>,
    pub gate: f64,
    /// Relative slack allowed when checking that TV does not increase.
    pub band: f64,
    pub final_below_gate: bool,
    pub monotone_within_band: bool,
    pub passed: bool,
    pub runtime_ms: u64,
    pub version: String,
}

/// Exhaustive TV against the limiting law for each `d`, flagged against a
/// gate at the largest `d` and a weak-monotonicity band.
pub fn convergence_scan(
    base: &ExperimentConfig,
    ds: RangeInclusive<u32>,
    gate: f64,
    band: f64,
) -> Result<ConvergenceReport, HarnessError> {
    let start = Instant::now();
    let mut rows = Vec::new();
    for d in ds {
        let mut config = base.clone();
        config.d = d;
        let report = super::run_exhaustive(&config)?;
        rows.push(ConvergenceRow {
            d,
            trials: report.trials,
            tv: report.tv.clone(),
            geometrically_reducible: report.geometrically_reducible,
            runtime_ms: report.runtime_ms,
        });
    }
    let final_below_gate = rows.last().is_some_and(|r| r.tv.float <= gate);
    let monotone_within_band = rows.windows(2).all(|w| w[1].tv.float <= w[0].tv.float * (1.0 + band));
    Ok(ConvergenceReport {
        config: base.clone(),
        rows,
        gate,
        band,
        final_below_gate,
        monotone_within_band,
        passed: final_below_gate && monotone_within_band,
        runtime_ms: start.elapsed().as_millis() as u64,
        version: VERSION.to_string(),
    })
}
