// SPDX-License-Identifier: Apache-2.0

//! Reader-writer lock microbenchmarks.
//!
//! Every run is also a correctness run: locks are wrapped in a
//! [`GuardedCounter`] and a torn read or a lost increment aborts the run with
//! [`BenchError::SafetyViolation`].

mod config;
mod csv;
mod oracle;
mod result;
mod runner;

use std::path::PathBuf;

use thiserror::Error;

pub use self::config::{BenchConfig, Benchmark, LockImpl};
pub use self::csv::{emit_csv, read_csv, write_csv, CsvRow};
pub use self::oracle::{GuardedCounter, TornRead};
pub use self::result::{median, BenchResult, ThreadReport, TRACE_LEN};
pub use self::runner::{
    run, run_alternator, run_interference, run_interference_shared, run_median, run_repeated,
    run_rwbench, run_testrwlock, worker_rng, BenchLock, InterferenceOutcome,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error("mutual exclusion violated in {benchmark} with {lock}: {detail}")]
    SafetyViolation {
        benchmark: Benchmark,
        lock: String,
        detail: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
