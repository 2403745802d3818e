// SPDX-License-Identifier: Apache-2.0

//! How the inhibit multiplier trades reader speed for writer latency.
//!
//! For each multiplier the same mixed workload runs for a second; the
//! revocation log shows how long revocations took and how long bias was
//! kept off afterwards.
//!
//! Usage: `cargo run --release --example revocation_policy [threads]`

use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use bravo::stats::SlowdownAccount;
use bravo::{BravoLock, Policy, RawRwLock, Stats};

fn main() {
    let threads: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);
    println!(
        "{:>3} {:>8} {:>11} {:>11} {:>12} {:>9}",
        "N", "fast %", "revocations", "mean ns", "revoking %", "bound ok"
    );
    for n in [0, 1, 3, 9, 30] {
        let stats = Arc::new(Stats::with_revocation_log());
        let lock: BravoLock = BravoLock::new()
            .with_policy(Policy::new(n))
            .with_stats(stats.clone());
        let deadline = Instant::now() + Duration::from_secs(1);
        thread::scope(|s| {
            for t in 0..threads {
                let lock = &lock;
                s.spawn(move || {
                    let mut i = t as u64;
                    while Instant::now() < deadline {
                        i = i
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        if i >> 58 == 0 {
                            lock.write_lock();
                            unsafe { lock.write_unlock() };
                        } else {
                            let token = lock.read_lock();
                            unsafe { lock.read_unlock(token) };
                        }
                    }
                });
            }
        });
        let s = stats.snapshot();
        let log = stats.revocation_log();
        let account = SlowdownAccount::from_records(&log);
        println!(
            "{:>3} {:>8.2} {:>11} {:>11} {:>12.3} {:>9}",
            n,
            100.0 * s.fast_fraction(),
            s.revocations,
            s.total_revocation_ns
                .checked_div(s.revocations)
                .unwrap_or(0),
            account.map_or(0.0, |a| 100.0 * a.revoking_ns as f64
                / a.window_ns.max(1) as f64),
            account.map_or(true, |a| a.within_bound(n)),
        );
    }
}
