// SPDX-License-Identifier: Apache-2.0

//! Checks of the inhibit-window arithmetic against recorded revocations.

use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use bravo::stats::SlowdownAccount;
use bravo::{BravoLock, Policy, RawRwLock, Stats, VisibleReadersTable};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy)]
pub struct PolicyReport {
    pub revocations: usize,
    pub revoking_ns: u64,
    pub window_ns: u64,
}

/// Runs a mixed read/write workload for `run_for` on `threads` threads with
/// multiplier `n`, then checks every revocation record:
/// the inhibit window is exactly `n` times the revocation, windows never
/// overlap the next revocation, and the total time spent revoking stays
/// within `1/(n+1)` of the covered interval plus one revocation of slack.
pub fn check(n: u64, threads: usize, run_for: Duration, seed: u64) -> Result<PolicyReport, String> {
    let stats = Arc::new(Stats::with_revocation_log());
    let lock = Arc::new(
        BravoLock::<bravo::CentralizedLock>::new()
            .with_table(Arc::new(VisibleReadersTable::new(4096).unwrap()))
            .with_policy(Policy::new(n))
            .with_stats(stats.clone()),
    );
    let deadline = Instant::now() + run_for;
    thread::scope(|s| {
        for t in 0..threads {
            let lock = &lock;
            s.spawn(move || {
                let mut rng = SmallRng::seed_from_u64(seed ^ t as u64);
                while Instant::now() < deadline {
                    for _ in 0..64 {
                        if rng.random_bool(0.02) {
                            lock.write_lock();
                            unsafe { lock.write_unlock() };
                        } else {
                            let token = lock.read_lock();
                            for _ in 0..rng.random_range(0..50) {
                                std::hint::spin_loop();
                            }
                            unsafe { lock.read_unlock(token) };
                        }
                    }
                }
            });
        }
    });

    let records = stats.revocation_log();
    if records.is_empty() {
        return Err("no revocations happened".into());
    }
    for r in &records {
        if r.multiplier != n {
            return Err(format!(
                "record carries multiplier {}, lock uses {n}",
                r.multiplier
            ));
        }
        if r.inhibit_window_ns() != n * r.duration_ns() {
            return Err(format!(
                "window {} ns for a {} ns revocation with n={n}",
                r.inhibit_window_ns(),
                r.duration_ns()
            ));
        }
    }
    for pair in records.windows(2) {
        if pair[1].start_ns < pair[0].inhibit_until_ns {
            return Err(format!(
                "revocation at {} inside the window ending {}",
                pair[1].start_ns, pair[0].inhibit_until_ns
            ));
        }
    }
    let account = SlowdownAccount::from_records(&records).unwrap();
    if !account.within_bound(n) {
        return Err(format!("writer slowdown exceeds 1/{}: {account:?}", n + 1));
    }
    let snapshot = stats.snapshot();
    if snapshot.revocations as usize != records.len() {
        return Err(format!(
            "{} revocations counted, {} logged",
            snapshot.revocations,
            records.len()
        ));
    }
    if snapshot.total_revocation_ns != account.revoking_ns {
        return Err("total revocation time disagrees with the log".into());
    }
    if snapshot.total_inhibit_ns != records.iter().map(|r| r.inhibit_window_ns()).sum::<u64>() {
        return Err("total inhibit time disagrees with the log".into());
    }
    Ok(PolicyReport {
        revocations: records.len(),
        revoking_ns: account.revoking_ns,
        window_ns: account.window_ns,
    })
}
