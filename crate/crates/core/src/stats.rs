// SPDX-License-Identifier: Apache-2.0

//! Per-lock event counters.
//!
//! Counters live in per-thread shards, each in its own cache sector, and are
//! only summed when a snapshot is taken. Recording is a single relaxed
//! increment on the caller's shard, so it adds no write sharing of its own.
//! Snapshots and resets are safe at any time but only exact at quiescence.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::sector::Sector;
use crate::table::LockId;
use crate::thread;

/// Shards owned by the threads with the matching index; one more is shared.
const OWNED_SHARDS: usize = 64;

/// Totals over all shards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockStats {
    pub fast_reads: u64,
    pub slow_reads: u64,
    pub write_acquires: u64,
    pub revocations: u64,
    pub total_revocation_ns: u64,
    pub total_inhibit_ns: u64,
    pub cas_failures: u64,
}

impl LockStats {
    pub fn reads(&self) -> u64 {
        self.fast_reads + self.slow_reads
    }

    /// Fraction of read acquisitions that took the fast path.
    pub fn fast_fraction(&self) -> f64 {
        match self.reads() {
            0 => 0.0,
            n => self.fast_reads as f64 / n as f64,
        }
    }

    fn add(&mut self, other: &LockStats) {
        self.fast_reads += other.fast_reads;
        self.slow_reads += other.slow_reads;
        self.write_acquires += other.write_acquires;
        self.revocations += other.revocations;
        self.total_revocation_ns += other.total_revocation_ns;
        self.total_inhibit_ns += other.total_inhibit_ns;
        self.cas_failures += other.cas_failures;
    }
}

impl std::ops::Add for LockStats {
    type Output = LockStats;

    fn add(mut self, rhs: LockStats) -> LockStats {
        LockStats::add(&mut self, &rhs);
        self
    }
}

impl std::iter::Sum for LockStats {
    fn sum<I: Iterator<Item = LockStats>>(iter: I) -> LockStats {
        iter.fold(LockStats::default(), |a, b| a + b)
    }
}

/// One revocation: the scan started at `start_ns`, every conflicting reader
/// had departed at `end_ns`, and bias may not be re-enabled before
/// `inhibit_until_ns`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RevocationRecord {
    pub lock: LockId,
    pub start_ns: u64,
    pub end_ns: u64,
    pub inhibit_until_ns: u64,
    pub multiplier: u64,
}

impl RevocationRecord {
    pub fn duration_ns(&self) -> u64 {
        self.end_ns - self.start_ns
    }

    pub fn inhibit_window_ns(&self) -> u64 {
        self.inhibit_until_ns - self.end_ns
    }
}

/// Recorded event.
#[derive(Debug, Clone, Copy)]
pub enum Event {
    FastRead,
    SlowRead,
    WriteAcquire,
    CasFailure,
    Revocation(RevocationRecord),
}

#[derive(Default)]
struct Shard {
    fast_reads: AtomicU64,
    slow_reads: AtomicU64,
    write_acquires: AtomicU64,
    revocations: AtomicU64,
    revocation_ns: AtomicU64,
    inhibit_ns: AtomicU64,
    cas_failures: AtomicU64,
    log: Mutex<Vec<RevocationRecord>>,
}

impl Shard {
    fn snapshot(&self) -> LockStats {
        LockStats {
            fast_reads: self.fast_reads.load(Ordering::Relaxed),
            slow_reads: self.slow_reads.load(Ordering::Relaxed),
            write_acquires: self.write_acquires.load(Ordering::Relaxed),
            revocations: self.revocations.load(Ordering::Relaxed),
            total_revocation_ns: self.revocation_ns.load(Ordering::Relaxed),
            total_inhibit_ns: self.inhibit_ns.load(Ordering::Relaxed),
            cas_failures: self.cas_failures.load(Ordering::Relaxed),
        }
    }

    fn reset(&self) {
        for c in [
            &self.fast_reads,
            &self.slow_reads,
            &self.write_acquires,
            &self.revocations,
            &self.revocation_ns,
            &self.inhibit_ns,
            &self.cas_failures,
        ] {
            c.store(0, Ordering::Relaxed);
        }
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clear();
    }
}

/// Sharded event sink, attachable to any number of locks.
pub struct Stats {
    enabled: AtomicBool,
    log_revocations: AtomicBool,
    shards: Box<[Sector<Shard>]>,
}

impl std::fmt::Debug for Stats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stats")
            .field("enabled", &self.is_enabled())
            .field("totals", &self.snapshot())
            .finish()
    }
}

impl Default for Stats {
    fn default() -> Self {
        Self::new()
    }
}

impl Stats {
    /// Enabled counters, revocation log off.
    pub fn new() -> Self {
        Stats {
            enabled: AtomicBool::new(true),
            log_revocations: AtomicBool::new(false),
            shards: (0..=OWNED_SHARDS).map(|_| Sector::default()).collect(),
        }
    }

    /// Counters plus a full log of every revocation.
    pub fn with_revocation_log() -> Self {
        let stats = Self::new();
        stats.log_revocations.store(true, Ordering::Relaxed);
        stats
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled.load(Ordering::Relaxed)
    }

    pub fn set_enabled(&self, enabled: bool) {
        self.enabled.store(enabled, Ordering::Relaxed);
    }

    pub fn set_revocation_log(&self, enabled: bool) {
        self.log_revocations.store(enabled, Ordering::Relaxed);
    }

    /// Records `event` in the calling thread's shard.
    ///
    /// A registered thread owns shard `index` exclusively when its index is
    /// below the shard count, so a plain load and store suffice; everyone
    /// else shares the last shard through atomic adds.
    #[inline]
    pub fn record(&self, event: Event) {
        if !self.enabled.load(Ordering::Relaxed) {
            return;
        }
        let index = thread::current_index();
        if index < OWNED_SHARDS {
            self.apply(&self.shards[index], event, |c, v| {
                c.store(c.load(Ordering::Relaxed).wrapping_add(v), Ordering::Relaxed)
            });
        } else {
            self.apply(&self.shards[OWNED_SHARDS], event, |c, v| {
                c.fetch_add(v, Ordering::Relaxed);
            });
        }
    }

    #[inline]
    fn apply(&self, shard: &Shard, event: Event, bump: impl Fn(&AtomicU64, u64)) {
        match event {
            Event::FastRead => bump(&shard.fast_reads, 1),
            Event::SlowRead => bump(&shard.slow_reads, 1),
            Event::WriteAcquire => bump(&shard.write_acquires, 1),
            Event::CasFailure => bump(&shard.cas_failures, 1),
            Event::Revocation(rec) => {
                bump(&shard.revocations, 1);
                bump(&shard.revocation_ns, rec.duration_ns());
                bump(&shard.inhibit_ns, rec.inhibit_window_ns());
                if self.log_revocations.load(Ordering::Relaxed) {
                    shard
                        .log
                        .lock()
                        .unwrap_or_else(|e| e.into_inner())
                        .push(rec);
                }
            }
        }
    }

    pub fn snapshot(&self) -> LockStats {
        self.shards.iter().map(|s| s.snapshot()).sum()
    }

    pub fn reset(&self) {
        for shard in self.shards.iter() {
            shard.reset();
        }
    }

    /// Logged revocations ordered by start time.
    pub fn revocation_log(&self) -> Vec<RevocationRecord> {
        let mut all: Vec<RevocationRecord> = self
            .shards
            .iter()
            .flat_map(|s| s.log.lock().unwrap_or_else(|e| e.into_inner()).clone())
            .collect();
        all.sort_by_key(|r| (r.start_ns, r.lock));
        all
    }
}

/// Writer-slowdown accounting for the revocations of a single lock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlowdownAccount {
    /// Sum of revocation durations.
    pub revoking_ns: u64,
    /// From the first revocation's start to the last inhibit window's end.
    pub window_ns: u64,
    /// Longest single revocation.
    pub max_revocation_ns: u64,
}

impl SlowdownAccount {
    /// Builds the account from one lock's revocation records.
    pub fn from_records(records: &[RevocationRecord]) -> Option<Self> {
        let first = records.iter().map(|r| r.start_ns).min()?;
        let last = records.iter().map(|r| r.inhibit_until_ns).max()?;
        Some(SlowdownAccount {
            revoking_ns: records.iter().map(RevocationRecord::duration_ns).sum(),
            window_ns: last - first,
            max_revocation_ns: records.iter().map(RevocationRecord::duration_ns).max()?,
        })
    }

    /// Whether time spent revoking stays within `1/(n+1)` of the window plus
    /// one revocation of slack.
    pub fn within_bound(&self, n: u64) -> bool {
        // revoking * (n+1) <= window + (n+1) * max, in integers.
        let lhs = self.revoking_ns as u128 * (n as u128 + 1);
        let rhs = self.window_ns as u128 + (n as u128 + 1) * self.max_revocation_ns as u128;
        lhs <= rhs
    }
}
