// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::result::BenchResult;
use super::BenchError;

/// One CSV line per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub benchmark: String,
    pub lock_impl: String,
    pub threads: usize,
    pub write_prob: f64,
    pub lock_pool: usize,
    pub table_size: usize,
    pub n: u64,
    pub seed: u64,
    pub run_index: usize,
    pub total_ops: u64,
    pub ops_per_sec: f64,
    pub fast_reads: u64,
    pub slow_reads: u64,
    pub revocations: u64,
    pub total_revocation_ns: u64,
}

impl From<&BenchResult> for CsvRow {
    fn from(r: &BenchResult) -> Self {
        CsvRow {
            benchmark: r.config.benchmark.to_string(),
            lock_impl: r.lock_label.clone(),
            threads: r.config.threads,
            write_prob: r.config.write_prob,
            lock_pool: r.config.lock_pool,
            table_size: r.config.table_size,
            n: r.config.n_multiplier,
            seed: r.config.seed,
            run_index: r.run_index,
            total_ops: r.total_ops,
            ops_per_sec: r.ops_per_sec,
            fast_reads: r.stats.fast_reads,
            slow_reads: r.stats.slow_reads,
            revocations: r.stats.revocations,
            total_revocation_ns: r.stats.total_revocation_ns,
        }
    }
}

/// Writes a header and one row per result.
pub fn write_csv<W: Write>(results: &[BenchResult], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for r in results {
        writer.serialize(CsvRow::from(r))?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `results` to `path`, replacing any existing file.
pub fn emit_csv(results: &[BenchResult], path: &Path) -> Result<(), BenchError> {
    if results.is_empty() {
        return Err(BenchError::Config("no results to write".into()));
    }
    let io = |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_csv(results, file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io(source),
        other => BenchError::Config(format!("csv encoding failed: {other:?}")),
    })
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>, BenchError> {
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
}
