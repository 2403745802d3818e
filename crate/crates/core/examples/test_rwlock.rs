// SPDX-License-Identifier: Apache-2.0

//! test_rwlock: one writer thread with a long pause between writes, every
//! other thread reading in a tight loop.
//!
//! Usage: `cargo run --release --example test_rwlock [threads] [seconds]`

use std::time::Duration;

use bravo::bench::{self, BenchConfig, Benchmark, LockImpl};

fn main() -> Result<(), bench::BenchError> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let threads = args.next().flatten().unwrap_or(4) as usize;
    let secs = args.next().flatten().unwrap_or(1);
    for lock in LockImpl::ALL {
        let cfg = BenchConfig::new(Benchmark::Testrwlock, lock)
            .threads(threads)
            .duration(Duration::from_secs(secs));
        let r = bench::run_testrwlock(&cfg)?;
        println!(
            "{:<18} reads {:>11}  writes {:>9}  revocations {:>7}",
            r.lock_label,
            r.total_reads(),
            r.total_writes(),
            r.stats.revocations
        );
    }
    Ok(())
}
