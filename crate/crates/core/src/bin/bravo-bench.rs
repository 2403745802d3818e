// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use bravo::bench::{self, BenchConfig, BenchError, BenchResult, Benchmark, LockImpl};
use clap::Parser;

const EXIT_SAFETY: u8 = 3;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 1;

/// Reader-writer lock microbenchmarks.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long, value_enum)]
    bench: Benchmark,
    /// Lock implementations (comma separated; default: all four).
    #[arg(long, value_enum, value_delimiter = ',')]
    lock: Vec<LockImpl>,
    /// Thread counts (comma separated; default: 1,2,4,8,#cpus).
    #[arg(long, value_delimiter = ',')]
    threads: Vec<usize>,
    /// Seconds per run.
    #[arg(long)]
    duration: Option<u64>,
    /// Write probability (rwbench), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.0001")]
    write_prob: Vec<f64>,
    /// Lock pool sizes (interference; default: 1,2,4,...,8192).
    #[arg(long, value_delimiter = ',')]
    pool: Vec<usize>,
    #[arg(long, default_value_t = bravo::DEFAULT_TABLE_SIZE)]
    table_size: usize,
    /// Inhibit multiplier.
    #[arg(long, default_value_t = bravo::Policy::DEFAULT_MULTIPLIER)]
    n: u64,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Repetitions per configuration; the median is reported.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Pin worker threads to cores.
    #[arg(long)]
    pin: bool,
    /// 10 s runs and 7 repetitions.
    #[arg(long)]
    full: bool,
}

fn default_threads() -> Vec<usize> {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut t = vec![1, 2, 4, 8, cpus];
    t.sort_unstable();
    t.dedup();
    t
}

fn configs(args: &Args) -> Vec<BenchConfig> {
    let locks = if args.lock.is_empty() {
        LockImpl::ALL.to_vec()
    } else {
        args.lock.clone()
    };
    let threads = if args.threads.is_empty() {
        default_threads()
    } else {
        args.threads.clone()
    };
    let pools = match (args.bench, args.pool.is_empty()) {
        (Benchmark::Interference, true) => (0..=13).map(|i| 1 << i).collect(),
        (_, true) => vec![1],
        _ => args.pool.clone(),
    };
    let probs = if args.bench == Benchmark::Rwbench {
        args.write_prob.clone()
    } else {
        vec![0.0]
    };
    let duration = args.duration.unwrap_or(if args.full { 10 } else { 3 });
    let mut out = Vec::new();
    for &lock in &locks {
        for &p in &probs {
            for &pool in &pools {
                for &t in &threads {
                    let mut cfg = BenchConfig::new(args.bench, lock)
                        .threads(t)
                        .duration(Duration::from_secs(duration))
                        .write_prob(p)
                        .lock_pool(pool)
                        .table_size(args.table_size)
                        .n_multiplier(args.n)
                        .seed(args.seed);
                    cfg.csv_path = args.csv.clone();
                    cfg.pin = args.pin;
                    out.push(cfg);
                }
            }
        }
    }
    out
}

fn report(r: &BenchResult) {
    println!(
        "{:<12} {:<26} threads={:<3} P={:<7} pool={:<5} run={} ops={:<11} ops/s={:<12.0} fast={} slow={} revocations={}",
        r.config.benchmark,
        r.lock_label,
        r.config.threads,
        r.config.write_prob,
        r.config.lock_pool,
        r.run_index,
        r.total_ops,
        r.ops_per_sec,
        r.stats.fast_reads,
        r.stats.slow_reads,
        r.stats.revocations,
    );
}

fn main() -> ExitCode {
    let args = Args::parse();
    let reps = args.reps.unwrap_or(if args.full { 7 } else { 3 });
    let mut raw = Vec::new();
    for cfg in configs(&args) {
        if let Err(e) = cfg.validate() {
            eprintln!("bravo-bench: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        match bench::run_repeated(&cfg, reps) {
            Ok(runs) => {
                runs.iter().for_each(report);
                for m in group_medians(&runs, reps) {
                    println!(
                        "  median of {reps}: {} {:.0} ops/s",
                        m.lock_label, m.ops_per_sec
                    );
                }
                raw.extend(runs);
            }
            Err(e @ BenchError::SafetyViolation { .. }) => {
                eprintln!("bravo-bench: {e}");
                return ExitCode::from(EXIT_SAFETY);
            }
            Err(e) => {
                eprintln!("bravo-bench: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    if let Some(path) = &args.csv {
        if let Err(e) = bench::emit_csv(&raw, path) {
            eprintln!("bravo-bench: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    ExitCode::SUCCESS
}

fn group_medians(runs: &[BenchResult], reps: usize) -> Vec<BenchResult> {
    let per_rep = runs.len() / reps.max(1);
    (0..per_rep)
        .filter_map(|i| {
            let group: Vec<BenchResult> = runs.iter().skip(i).step_by(per_rep).cloned().collect();
            bench::median(&group)
        })
        .collect()
}
