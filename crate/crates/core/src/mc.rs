//! Seeded, parallel Monte Carlo.
//!
//! Work is split over a fixed number of workers; worker `w` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `w`. Results depend only on
//! `(seed, workers)`, not on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_WORKERS: usize = 8;

pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Near-equal split of `total` over `workers` (first ones get the remainder).
pub fn split(total: u64, workers: usize) -> Vec<u64> {
    let w = workers.max(1) as u64;
    (0..w).map(|i| total / w + u64::from(i < total % w)).collect()
}

/// Runs `f(rng, count, worker)` for each worker in parallel; results are in
/// worker order.
pub fn run_parallel<T, F>(seed: u64, total: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64, usize) -> T + Sync,
{
    split(total, workers)
        .into_par_iter()
        .enumerate()
        .map(|(w, count)| f(&mut worker_rng(seed, w), count, w))
        .collect()
}

/// Counts `true` outcomes of `trial` over `total` seeded draws.
pub fn estimate_probability<F>(seed: u64, total: u64, workers: usize, trial: F) -> BernoulliEstimate
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let hits: u64 = run_parallel(seed, total, workers, |rng, count, _| (0..count).filter(|_| trial(rng)).count() as u64)
        .into_iter()
        .sum();
    BernoulliEstimate::new(hits, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p: f64,
    /// Binomial standard error `sqrt(p (1 - p) / trials)`.
    pub std_error: f64,
}

impl BernoulliEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_error = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        BernoulliEstimate { successes, trials, p, std_error }
    }
}
