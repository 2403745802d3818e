// SPDX-License-Identifier: Apache-2.0

//! Alternator: threads take turns acquiring a lock for reading, so every
//! acquisition hands the lock word (or the reader's table slot) to another
//! core.
//!
//! Usage: `cargo run --release --example alternator [threads] [seconds]`

use std::time::Duration;

use bravo::bench::{self, BenchConfig, Benchmark, LockImpl};

fn main() -> Result<(), bench::BenchError> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let threads = args.next().flatten().unwrap_or(4) as usize;
    let secs = args.next().flatten().unwrap_or(1);
    for lock in LockImpl::ALL {
        let cfg = BenchConfig::new(Benchmark::Alternator, lock)
            .threads(threads)
            .duration(Duration::from_secs(secs));
        let r = bench::run_alternator(&cfg)?;
        println!(
            "{:<18} {:>12.0} ops/s  fast reads {:>10}  slow reads {:>6}",
            r.lock_label, r.ops_per_sec, r.stats.fast_reads, r.stats.slow_reads
        );
    }
    Ok(())
}
