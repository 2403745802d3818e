// SPDX-License-Identifier: Apache-2.0

//! RWBench across write probabilities, reporting each BRAVO lock's
//! throughput relative to the lock it wraps. Writes a CSV of every run if a
//! path is given.
//!
//! Usage: `cargo run --release --example rwbench [threads] [csv-path]`

use std::path::PathBuf;
use std::time::Duration;

use bravo::bench::{self, BenchConfig, Benchmark, LockImpl};

fn main() -> Result<(), bench::BenchError> {
    let mut args = std::env::args().skip(1);
    let threads = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let csv = args.next().map(PathBuf::from);
    let mut all = Vec::new();
    println!(
        "{:>8} {:>14} {:>14} {:>8}",
        "P", "centralized", "bravo-c", "ratio"
    );
    for p in [0.9, 0.5, 0.1, 0.01, 0.001, 0.0001] {
        let run = |lock| {
            let cfg = BenchConfig::new(Benchmark::Rwbench, lock)
                .threads(threads)
                .duration(Duration::from_secs(1))
                .write_prob(p);
            bench::run_rwbench(&cfg)
        };
        let base = run(LockImpl::Centralized)?;
        let bravo = run(LockImpl::BravoCentralized)?;
        println!(
            "{:>8} {:>14.0} {:>14.0} {:>8.3}",
            p,
            base.ops_per_sec,
            bravo.ops_per_sec,
            bravo.ops_per_sec / base.ops_per_sec
        );
        all.extend([base, bravo]);
    }
    if let Some(path) = csv {
        bench::emit_csv(&all, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
