// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use super::config::BenchConfig;
use crate::stats::LockStats;

/// Decisions kept per thread for reproducibility checks.
pub const TRACE_LEN: usize = 64;

/// What one worker thread did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ThreadReport {
    pub ops: u64,
    pub reads: u64,
    pub writes: u64,
    /// First [`TRACE_LEN`] random decisions the worker made (write flag and
    /// non-critical length for RWBench, lock index for interference).
    pub trace: Vec<u64>,
}

impl ThreadReport {
    pub(crate) fn note(&mut self, decision: u64) {
        if self.trace.len() < TRACE_LEN {
            self.trace.push(decision);
        }
    }
}

/// Outcome of one benchmark run.
#[derive(Debug, Clone)]
pub struct BenchResult {
    pub config: BenchConfig,
    /// Lock label as written to CSV; the interference baseline appends
    /// `-private`.
    pub lock_label: String,
    pub run_index: usize,
    pub total_ops: u64,
    pub elapsed: Duration,
    pub ops_per_sec: f64,
    pub per_thread: Vec<ThreadReport>,
    pub stats: LockStats,
    /// Locks in the pool with reader bias on when the run stopped (BRAVO
    /// locks only).
    pub biased_at_end: Option<usize>,
    /// Set on the result picked as the median of that many repetitions.
    pub median_of: Option<usize>,
}

impl BenchResult {
    pub(crate) fn new(
        config: &BenchConfig,
        lock_label: String,
        per_thread: Vec<ThreadReport>,
        elapsed: Duration,
        stats: LockStats,
        biased_at_end: Option<usize>,
    ) -> Self {
        let total_ops = per_thread.iter().map(|t| t.ops).sum();
        BenchResult {
            config: config.clone(),
            lock_label,
            run_index: 0,
            total_ops,
            elapsed,
            ops_per_sec: total_ops as f64 / elapsed.as_secs_f64(),
            per_thread,
            stats,
            biased_at_end,
            median_of: None,
        }
    }

    pub fn total_writes(&self) -> u64 {
        self.per_thread.iter().map(|t| t.writes).sum()
    }

    pub fn total_reads(&self) -> u64 {
        self.per_thread.iter().map(|t| t.reads).sum()
    }
}

/// The median run by throughput (the lower middle one for even counts),
/// marked with `median_of`.
pub fn median(runs: &[BenchResult]) -> Option<BenchResult> {
    let mut sorted: Vec<&BenchResult> = runs.iter().collect();
    sorted.sort_by(|a, b| a.ops_per_sec.total_cmp(&b.ops_per_sec));
    let mut mid = sorted.get((sorted.len().max(1) - 1) / 2).copied()?.clone();
    mid.median_of = Some(runs.len());
    Some(mid)
}
