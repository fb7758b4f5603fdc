use std::ops::Range;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::observe::{Observation, SiteObserver};
use super::report::{ExperimentReport, SamplingStats};
use super::{ExperimentConfig, HarnessError, Histogram, Mode, GENERATOR_NAME};
use crate::ff::FieldElement as Fe;
use crate::polyring::enumerate::{advance, coeffs_at};
use crate::polyring::degree_count;

/// Indices per parallel work item in exhaustive scans.
pub(crate) const EXHAUSTIVE_CHUNK: u128 = 1 << 14;

/// Admitted samples per Monte Carlo shard; shard `i` is seeded with
/// `seed ^ i`, so the sample set does not depend on the thread count.
pub const MC_SHARD_SIZE: u64 = 4096;

/// Consecutive rejected draws after which sampling gives up.
pub const REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    pub histogram: Histogram,
    pub geometrically_reducible: u64,
    pub power_free: u64,
    pub draws: u64,
}

impl Tally {
    fn absorb(&mut self, obs: Observation) {
        self.draws += 1;
        match obs {
            Observation::NotPowerFree => {}
            Observation::Filtered => self.power_free += 1,
            Observation::Admitted { outcome, geometrically_reducible } => {
                self.power_free += 1;
                self.geometrically_reducible += geometrically_reducible as u64;
                self.histogram.record(outcome);
            }
        }
    }

    pub(crate) fn merge(mut self, other: Tally) -> Tally {
        self.histogram = self.histogram.merge(other.histogram);
        self.geometrically_reducible += other.geometrically_reducible;
        self.power_free += other.power_free;
        self.draws += other.draws;
        self
    }
}

/// Runs `f` on a pool of `threads` workers, or the global pool for 0.
pub(crate) fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, HarnessError> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Sequential scan of one index range of degree-`d` polynomials.
pub(crate) fn scan_range(observer: &SiteObserver, d: usize, range: Range<u128>) -> Tally {
    let q = observer.field().q();
    let mut tally = Tally::default();
    if range.is_empty() {
        return tally;
    }
    let mut coeffs = coeffs_at(q, d, range.start);
    for i in range.clone() {
        tally.absorb(observer.observe(&coeffs));
        if i + 1 < range.end {
            advance(q, &mut coeffs);
        }
    }
    tally
}

/// Splits `0..count` into fixed chunks, scans them in parallel, and merges
/// by exact addition, so the result is independent of scheduling.
pub(crate) fn scan_all(observer: &SiteObserver, d: usize, count: u128) -> Tally {
    let chunks = count.div_ceil(EXHAUSTIVE_CHUNK) as usize;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * EXHAUSTIVE_CHUNK;
            scan_range(observer, d, start..(start + EXHAUSTIVE_CHUNK).min(count))
        })
        .reduce(Tally::default, Tally::merge)
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    match config.mode {
        Mode::Exhaustive => run_exhaustive(config),
        Mode::Montecarlo => run_montecarlo(config),
    }
}

/// Every polynomial of exact degree `d`, restricted to the n-th power-free
/// ones in the configured subset.
pub fn run_exhaustive(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let mut config = config.clone();
    config.mode = Mode::Exhaustive;
    let field = config.validate()?;
    let observer = SiteObserver::new(field.clone(), &config);
    let count = degree_count(field.q(), config.d as usize);
    let tally = with_threads(config.threads, || scan_all(&observer, config.d as usize, count))?;
    ExperimentReport::build(
        &config,
        &field,
        tally.histogram,
        tally.geometrically_reducible,
        None,
        start.elapsed().as_millis() as u64,
    )
}

fn run_shard(observer: &SiteObserver, d: usize, seed: u64, shard: u64, quota: u64) -> Result<Tally, HarnessError> {
    let q = observer.field().q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ shard);
    let mut coeffs = vec![Fe::ZERO; d + 1];
    let mut tally = Tally::default();
    let mut misses = 0u64;
    while tally.histogram.trials() < quota {
        for c in coeffs[..d].iter_mut() {
            *c = Fe(rng.gen_range(0..q));
        }
        coeffs[d] = Fe(rng.gen_range(1..q));
        let before = tally.histogram.trials();
        tally.absorb(observer.observe(&coeffs));
        if tally.histogram.trials() == before {
            misses += 1;
            if misses >= REJECTION_CAP {
                return Err(HarnessError::NoAcceptance { cap: REJECTION_CAP });
            }
        } else {
            misses = 0;
        }
    }
    Ok(tally)
}

/// Uniform draws from the exact-degree-`d` polynomials with rejection of
/// those outside the admitted family, until `samples` are admitted.
pub fn run_montecarlo(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let mut config = config.clone();
    config.mode = Mode::Montecarlo;
    let field = config.validate()?;
    let observer = SiteObserver::new(field.clone(), &config);
    let d = config.d as usize;
    let shards = config.samples.div_ceil(MC_SHARD_SIZE);
    let tally = with_threads(config.threads, || {
        (0..shards)
            .into_par_iter()
            .map(|i| {
                let quota = MC_SHARD_SIZE.min(config.samples - i * MC_SHARD_SIZE);
                run_shard(&observer, d, config.seed, i, quota)
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    })??;
    let sampling = SamplingStats {
        generator: GENERATOR_NAME.to_string(),
        shard_size: MC_SHARD_SIZE,
        draws: tally.draws,
        power_free: tally.power_free,
        accepted: tally.histogram.trials(),
    };
    ExperimentReport::build(
        &config,
        &field,
        tally.histogram,
        tally.geometrically_reducible,
        Some(sampling),
        start.elapsed().as_millis() as u64,
    )
}
