// SPDX-License-Identifier: Apache-2.0

use bravo::{hash_slot, LockId};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic of `counts` against a uniform expectation.
pub fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Two-sided 95% acceptance band for a chi-square with `buckets - 1`
/// degrees of freedom.
pub fn band_95(buckets: usize) -> (f64, f64) {
    let dist = ChiSquared::new((buckets - 1) as f64).unwrap();
    (dist.inverse_cdf(0.025), dist.inverse_cdf(0.975))
}

pub struct Uniformity {
    pub statistic: f64,
    pub band: (f64, f64),
}

impl Uniformity {
    pub fn passes(&self) -> bool {
        self.band.0 <= self.statistic && self.statistic <= self.band.1
    }
}

/// Buckets `samples` pseudo-random (thread index, lock id) pairs.
pub fn random_pairs(samples: usize, buckets: usize, seed: u64) -> Uniformity {
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut counts = vec![0u64; buckets];
    for _ in 0..samples {
        let thread = rng.random::<u32>() as usize;
        let lock = LockId::from_raw(rng.random_range(1..=u64::MAX)).unwrap();
        counts[hash_slot(thread, lock, buckets)] += 1;
    }
    Uniformity {
        statistic: chi_square(&counts),
        band: band_95(buckets),
    }
}

/// Buckets the realistic input shape: consecutive thread indices against
/// consecutively allocated lock ids.
pub fn dense_grid(threads: usize, locks: usize, buckets: usize) -> Uniformity {
    let mut counts = vec![0u64; buckets];
    for lock in 1..=locks as u64 {
        let lock = LockId::from_raw(lock).unwrap();
        for thread in 0..threads {
            counts[hash_slot(thread, lock, buckets)] += 1;
        }
    }
    Uniformity {
        statistic: chi_square(&counts),
        band: band_95(buckets),
    }
}

/// Determinism and range over `samples` random inputs; returns the first
/// offending input.
pub fn determinism_and_range(samples: usize, buckets: usize, seed: u64) -> Result<(), String> {
    let mut rng = SmallRng::seed_from_u64(seed);
    for _ in 0..samples {
        let thread = rng.random::<u64>() as usize;
        let lock = LockId::from_raw(rng.random_range(1..=u64::MAX)).unwrap();
        let a = hash_slot(thread, lock, buckets);
        let b = hash_slot(thread, lock, buckets);
        if a != b || a >= buckets {
            return Err(format!("thread {thread} lock {lock:?}: {a} then {b}"));
        }
    }
    Ok(())
}
