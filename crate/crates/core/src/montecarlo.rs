//! Reproducible parallel Monte Carlo.
//!
//! Draws are split into a fixed number of shards. Shard `k` owns its own
//! ChaCha8 stream (`seed`, stream `k`), and shard sums are combined in shard
//! order, so the estimate depends only on `(seed, shards, draws)` and not on
//! how many threads rayon happens to use.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DRAWS: u64 = 1_000_000;
pub const DEFAULT_SHARDS: usize = 8;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub draws: u64,
}

impl MonteCarloEstimate {
    /// `|estimate - value| / std_error`
    pub fn z_score(&self, value: f64) -> f64 {
        (self.estimate - value).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub draws: u64,
    pub seed: u64,
    pub shards: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            draws: DEFAULT_DRAWS,
            seed: DEFAULT_SEED,
            shards: DEFAULT_SHARDS,
        }
    }
}

/// The generator for shard `shard`.
pub fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Mean and standard error of `sample` over `config.draws` independent draws.
pub fn sharded_mean<F>(config: &MonteCarloConfig, sample: F) -> Result<MonteCarloEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if config.draws < 2 {
        return Err(Error::InvalidInput("need at least 2 draws".into()));
    }
    if config.shards == 0 {
        return Err(Error::InvalidInput("need at least 1 shard".into()));
    }
    let base = config.draws / config.shards as u64;
    let extra = config.draws % config.shards as u64;
    let partial: Vec<(f64, f64)> = (0..config.shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = shard_rng(config.seed, k);
            let count = base + u64::from((k as u64) < extra);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let v = sample(&mut rng);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let n = config.draws as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (variance / n).sqrt(),
        draws: config.draws,
    })
}

/// Sampler over indices `0..weights.len()`.
pub fn index_sampler(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::InvalidInput(format!("bad sampling weights: {e}")))
}

/// Draws an index from a prepared sampler.
pub fn draw_index(sampler: &WeightedIndex<f64>, rng: &mut ChaCha8Rng) -> usize {
    sampler.sample(rng)
}
