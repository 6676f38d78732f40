//! Seeded, batch-parallel Monte Carlo plumbing.
//!
//! Every estimator splits its samples into batches. Batch `i` draws from the
//! ChaCha8 stream `i` of the generator seeded with `seed`, so batches are
//! independent, can run on any number of threads, and the merged result
//! depends only on `(seed, samples, batch)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub const DEFAULT_SAMPLES: u64 = 200_000;

pub const DEFAULT_BATCH: u64 = 8_192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    #[serde(default = "default_batch")]
    pub batch: u64,
}

fn default_batch() -> u64 {
    DEFAULT_BATCH
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            batch: DEFAULT_BATCH,
        }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            batch: DEFAULT_BATCH,
        }
    }

    pub fn with_samples(self, samples: u64) -> Self {
        Self { samples, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Derived configuration for an independent sub-estimate.
    pub fn derived(self, salt: u64) -> Self {
        let mixed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(salt.wrapping_mul(0xD1B5_4A32_D192_ED03))
            .rotate_left(17);
        Self { seed: mixed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return validation("Monte Carlo needs at least 2 samples");
        }
        if self.batch == 0 {
            return validation("batch size must be positive");
        }
        Ok(())
    }

    pub(crate) fn rng(&self, batch_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(batch_index);
        rng
    }

    fn batches(&self) -> Vec<(u64, u64)> {
        let batch = self.batch.max(1);
        let n = self.samples.div_ceil(batch);
        (0..n)
            .map(|i| (i, batch.min(self.samples - i * batch)))
            .collect()
    }
}

/// Monte Carlo (or exact, with zero error) estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
            seed: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.samples == 0
    }

    /// `|self - target|` in units of the standard error; infinite when the
    /// error is zero and the values differ.
    pub fn sigma_distance(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff <= 1e-12 * target.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Streaming mean and variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
    max_abs: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.max_abs = self.max_abs.max(x.abs());
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
        self.max_abs = self.max_abs.max(other.max_abs);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Largest `|x|` seen.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    /// Estimate of `scale * E[X]`.
    pub fn estimate(&self, scale: f64, seed: u64) -> Estimate {
        Estimate {
            value: scale * self.mean,
            std_error: scale.abs() * self.std_error(),
            samples: self.n,
            seed: Some(seed),
        }
    }
}

/// Runs `body(rng, count, stats)` once per batch, in parallel, and merges
/// the batch statistics in batch order.
pub fn run_batches<F>(cfg: &McConfig, body: F) -> RunningStats
where
    F: Fn(&mut ChaCha8Rng, u64, &mut RunningStats) + Sync,
{
    let parts: Vec<RunningStats> = cfg
        .batches()
        .into_par_iter()
        .map(|(index, count)| {
            let mut rng = cfg.rng(index);
            let mut stats = RunningStats::default();
            body(&mut rng, count, &mut stats);
            stats
        })
        .collect();
    let mut total = RunningStats::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Standard normal vector of length `n`.
pub(crate) fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> crate::Vector {
    use rand_distr::{Distribution, StandardNormal};
    crate::Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Uniform point on `S^{n-1}`.
pub(crate) fn sphere_point<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> crate::Vector {
    loop {
        let g = gaussian_vector(rng, n);
        let len = g.norm();
        if len > 1e-12 {
            return g / len;
        }
    }
}
