// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use clap::ValueEnum;

use super::BenchError;
use crate::bravo::Policy;
use crate::table::DEFAULT_TABLE_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Benchmark {
    /// Ring of threads passing a token; each holder takes and drops read
    /// permission on one shared lock.
    Alternator,
    /// One writer, `threads - 1` readers on one lock.
    Testrwlock,
    /// Every thread mixes reads and writes with write probability P.
    Rwbench,
    /// Read-only acquisitions spread over a pool of locks; compares the
    /// shared table against per-lock private tables.
    Interference,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [
        Benchmark::Alternator,
        Benchmark::Testrwlock,
        Benchmark::Rwbench,
        Benchmark::Interference,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::Alternator => "alternator",
            Benchmark::Testrwlock => "testrwlock",
            Benchmark::Rwbench => "rwbench",
            Benchmark::Interference => "interference",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum LockImpl {
    Centralized,
    Distributed,
    BravoCentralized,
    BravoDistributed,
}

impl LockImpl {
    pub const ALL: [LockImpl; 4] = [
        LockImpl::Centralized,
        LockImpl::Distributed,
        LockImpl::BravoCentralized,
        LockImpl::BravoDistributed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LockImpl::Centralized => "centralized",
            LockImpl::Distributed => "distributed",
            LockImpl::BravoCentralized => "bravo-centralized",
            LockImpl::BravoDistributed => "bravo-distributed",
        }
    }

    pub fn is_bravo(self) -> bool {
        matches!(
            self,
            LockImpl::BravoCentralized | LockImpl::BravoDistributed
        )
    }
}

impl fmt::Display for LockImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub benchmark: Benchmark,
    pub lock_impl: LockImpl,
    pub threads: usize,
    pub duration: Duration,
    /// Write probability per operation (RWBench only).
    pub write_prob: f64,
    /// Number of locks (interference only; the other benchmarks use one).
    pub lock_pool: usize,
    pub table_size: usize,
    pub n_multiplier: u64,
    pub seed: u64,
    /// Where `bravo-bench` writes results; ignored by the library runners.
    pub csv_path: Option<PathBuf>,
    /// Pin worker `i` to core `i mod cores`.
    pub pin: bool,
}

impl BenchConfig {
    pub fn new(benchmark: Benchmark, lock_impl: LockImpl) -> Self {
        BenchConfig {
            benchmark,
            lock_impl,
            threads: 1,
            duration: Duration::from_secs(3),
            write_prob: 0.0,
            lock_pool: 1,
            table_size: DEFAULT_TABLE_SIZE,
            n_multiplier: Policy::DEFAULT_MULTIPLIER,
            seed: 0x5eed,
            csv_path: None,
            pin: false,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn duration(mut self, duration: Duration) -> Self {
        self.duration = duration;
        self
    }

    pub fn write_prob(mut self, p: f64) -> Self {
        self.write_prob = p;
        self
    }

    pub fn lock_pool(mut self, pool: usize) -> Self {
        self.lock_pool = pool;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_multiplier(mut self, n: u64) -> Self {
        self.n_multiplier = n;
        self
    }

    pub fn table_size(mut self, size: usize) -> Self {
        self.table_size = size;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |msg: String| Err(BenchError::Config(msg));
        if self.threads < 1 {
            return fail("threads must be at least 1".into());
        }
        if self.duration < Duration::from_secs(1) {
            return fail(format!(
                "duration must be at least 1 s, got {:?}",
                self.duration
            ));
        }
        if !(0.0..=1.0).contains(&self.write_prob) {
            return fail(format!(
                "write probability {} not in [0, 1]",
                self.write_prob
            ));
        }
        if !self.table_size.is_power_of_two() {
            return fail(format!(
                "table size {} is not a power of two",
                self.table_size
            ));
        }
        if self.benchmark == Benchmark::Interference && !self.lock_pool.is_power_of_two() {
            return fail(format!(
                "lock pool {} is not a power of two",
                self.lock_pool
            ));
        }
        if self.lock_pool < 1 {
            return fail("lock pool must be at least 1".into());
        }
        Ok(())
    }

    pub(crate) fn expect(&self, benchmark: Benchmark) -> Result<(), BenchError> {
        if self.benchmark != benchmark {
            return Err(BenchError::Config(format!(
                "config is for {}, not {}",
                self.benchmark, benchmark
            )));
        }
        self.validate()
    }
}
