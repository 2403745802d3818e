// SPDX-License-Identifier: Apache-2.0

//! Interference between locks sharing the visible readers table: readers
//! pick locks at random from a pool, once with every lock publishing into
//! the shared table and once with a private table per lock.
//!
//! Usage: `cargo run --release --example interference [threads]`

use std::time::Duration;

use bravo::bench::{self, BenchConfig, Benchmark, LockImpl};

fn main() -> Result<(), bench::BenchError> {
    let threads = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    println!(
        "{:>6} {:>14} {:>14} {:>7}",
        "pool", "shared", "private", "ratio"
    );
    for pool in (0..=13).step_by(2).map(|i| 1usize << i) {
        let cfg = BenchConfig::new(Benchmark::Interference, LockImpl::BravoCentralized)
            .threads(threads)
            .duration(Duration::from_secs(1))
            .lock_pool(pool);
        let o = bench::run_interference(&cfg)?;
        let private = o
            .private
            .as_ref()
            .expect("bravo locks have a private baseline");
        println!(
            "{:>6} {:>14.0} {:>14.0} {:>7.3}",
            pool,
            o.shared.ops_per_sec,
            private.ops_per_sec,
            o.ratio().unwrap()
        );
    }
    Ok(())
}
