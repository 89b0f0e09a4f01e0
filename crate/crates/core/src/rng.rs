//! Counter-based random stream.
//!
//! Draw `i` (zero-based) of a stream with seed `s` is the SplitMix64 finalizer
//! applied to `s + (i + 1) * 0x9E3779B97F4A7C15` (wrapping). This is exactly the
//! `i+1`-th output of the reference SplitMix64 generator seeded with `s`, so the
//! sequence is fully specified by integer arithmetic and identical on every
//! platform. Uniforms use the top 53 bits: `(x >> 11) * 2^-53`, in `[0, 1)`.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output mixing function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded stream of uniform draws addressed by a counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStream {
    seed: u64,
    counter: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of draws consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Raw 64-bit value at an arbitrary position, without advancing.
    pub fn peek_u64(&self, index: u64) -> u64 {
        let x = self
            .seed
            .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        mix64(x)
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = self.peek_u64(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial: one uniform draw, success when `u < p`.
    /// `p <= 0` never succeeds and `p >= 1` always does.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_uniform() < p
    }
}

/// Seed for run `run_index` of a family rooted at `base_seed`.
pub fn derive_seed(base_seed: u64, run_index: u64) -> u64 {
    mix64(base_seed ^ mix64(run_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives `count` seeds and fails with the first colliding pair of indices.
pub fn derive_seeds(base_seed: u64, count: u64) -> Result<Vec<u64>, (u64, u64)> {
    let mut seen = HashSet::with_capacity(count as usize);
    let mut seeds = Vec::with_capacity(count as usize);
    for i in 0..count {
        let s = derive_seed(base_seed, i);
        if !seen.insert(s) {
            let j = seeds.iter().position(|&x| x == s).unwrap() as u64;
            return Err((j, i));
        }
        seeds.push(s);
    }
    Ok(seeds)
}
