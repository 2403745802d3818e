// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Barrier, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use rand::rngs::SmallRng;
use rand::{Rng, RngCore, SeedableRng};

use super::config::{BenchConfig, Benchmark, LockImpl};
use super::oracle::{GuardedCounter, TornRead};
use super::result::{median, BenchResult, ThreadReport};
use super::BenchError;
use crate::backoff::Backoff;
use crate::bravo::{BravoLock, Policy};
use crate::centralized::CentralizedLock;
use crate::distributed::DistributedLock;
use crate::raw::RawRwLock;
use crate::sector::Sector;
use crate::stats::{LockStats, Stats};
use crate::table::VisibleReadersTable;

/// Locks the harness knows how to drive.
pub trait BenchLock: RawRwLock {
    /// Reader bias state, for locks that have one.
    fn biased(&self) -> Option<bool> {
        None
    }
}

impl BenchLock for CentralizedLock {}
impl BenchLock for DistributedLock {}
impl<L: RawRwLock> BenchLock for BravoLock<L> {
    fn biased(&self) -> Option<bool> {
        Some(self.is_biased())
    }
}

type Pool<L> = Vec<Sector<GuardedCounter<L>>>;

/// One unit of busy work: a countdown the optimizer cannot drop.
#[inline]
fn spin_work(units: u32) {
    let mut n = black_box(units);
    while n > 0 {
        n = black_box(n - 1);
    }
}

#[inline]
fn advance(rng: &mut SmallRng, steps: u32) {
    for _ in 0..steps {
        black_box(rng.next_u64());
    }
}

/// Deterministic per-thread generator.
pub fn worker_rng(seed: u64, thread: usize) -> SmallRng {
    SmallRng::seed_from_u64(seed ^ (thread as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Run-wide stop flag and first safety violation.
struct Control {
    stop: AtomicBool,
    violation: Mutex<Option<String>>,
}

impl Control {
    #[inline]
    fn running(&self) -> bool {
        !self.stop.load(Ordering::Acquire)
    }

    fn fail(&self, what: String) {
        let mut v = self.violation.lock().unwrap_or_else(|e| e.into_inner());
        v.get_or_insert(what);
        self.stop.store(true, Ordering::Release);
    }

    fn torn(&self, thread: usize, lock: usize, t: TornRead) {
        self.fail(format!(
            "thread {thread} saw the counter of lock {lock} change from {} to {} under read permission",
            t.first, t.second
        ));
    }
}

/// Spawns `cfg.threads` workers, releases them together, stops them after
/// `cfg.duration` and collects their reports.
fn drive<F>(cfg: &BenchConfig, body: F) -> Result<(Vec<ThreadReport>, Duration), String>
where
    F: Fn(usize, &Control) -> ThreadReport + Sync,
{
    let control = Control {
        stop: AtomicBool::new(false),
        violation: Mutex::new(None),
    };
    let start = Barrier::new(cfg.threads + 1);
    let cores = if cfg.pin {
        core_affinity::get_core_ids().unwrap_or_default()
    } else {
        Vec::new()
    };
    let (reports, elapsed) = thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|t| {
                let (control, start, body, cores) = (&control, &start, &body, &cores);
                s.spawn(move || {
                    if !cores.is_empty() {
                        core_affinity::set_for_current(cores[t % cores.len()]);
                    }
                    start.wait();
                    body(t, control)
                })
            })
            .collect();
        start.wait();
        let began = Instant::now();
        let deadline = began + cfg.duration;
        while control.running() {
            let now = Instant::now();
            if now >= deadline {
                break;
            }
            thread::sleep((deadline - now).min(Duration::from_millis(50)));
        }
        control.stop.store(true, Ordering::Release);
        let elapsed = began.elapsed();
        let reports: Vec<ThreadReport> = handles
            .into_iter()
            .map(|h| h.join().expect("benchmark worker panicked"))
            .collect();
        (reports, elapsed)
    });
    match control
        .violation
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
    {
        Some(v) => Err(v),
        None => Ok((reports, elapsed)),
    }
}

/// Everything shared by the lock constructors of one run.
struct LockEnv {
    policy: Policy,
    table: Option<Arc<VisibleReadersTable>>,
    stats: Arc<Stats>,
    sublocks: NonZeroUsize,
    table_size: usize,
}

impl LockEnv {
    fn new(cfg: &BenchConfig, private_tables: bool) -> Self {
        let global = VisibleReadersTable::global();
        let table = if private_tables {
            None
        } else if global.len() == cfg.table_size {
            Some(Arc::clone(global))
        } else {
            Some(Arc::new(
                VisibleReadersTable::new(cfg.table_size).expect("validated table size"),
            ))
        };
        LockEnv {
            policy: Policy::new(cfg.n_multiplier),
            table,
            stats: Arc::new(Stats::new()),
            sublocks: thread::available_parallelism().unwrap_or(NonZeroUsize::MIN),
            table_size: cfg.table_size,
        }
    }

    fn table(&self) -> Arc<VisibleReadersTable> {
        match &self.table {
            Some(t) => Arc::clone(t),
            None => {
                Arc::new(VisibleReadersTable::new(self.table_size).expect("validated table size"))
            }
        }
    }

    fn bravo<L: RawRwLock>(&self, underlying: L) -> BravoLock<L> {
        BravoLock::with_underlying(underlying)
            .with_table(self.table())
            .with_policy(self.policy)
            .with_stats(Arc::clone(&self.stats))
    }
}

/// A benchmark body generic over the lock type.
trait Workload {
    fn run<L: BenchLock>(
        &self,
        cfg: &BenchConfig,
        pool: &[Sector<GuardedCounter<L>>],
        control: &Control,
        thread: usize,
    ) -> ThreadReport;
}

fn build_pool<L: RawRwLock>(n: usize, make: impl Fn() -> L) -> Pool<L> {
    (0..n)
        .map(|_| Sector::new(GuardedCounter::new(make())))
        .collect()
}

fn execute<L: BenchLock, W: Workload + Sync>(
    cfg: &BenchConfig,
    label: String,
    workload: &W,
    mut pool: Pool<L>,
    stats: &Stats,
) -> Result<BenchResult, BenchError> {
    let safety = |detail: String| BenchError::SafetyViolation {
        benchmark: cfg.benchmark,
        lock: label.clone(),
        detail,
    };
    let (reports, elapsed) =
        drive(cfg, |t, control| workload.run(cfg, &pool, control, t)).map_err(&safety)?;
    let writes: u64 = reports.iter().map(|r| r.writes).sum();
    let counted: u64 = pool.iter_mut().map(|g| g.value()).sum();
    if counted != writes {
        return Err(safety(format!(
            "{writes} write sections but the guarded counters sum to {counted}"
        )));
    }
    let biased = pool
        .iter()
        .map(|g| g.lock().biased())
        .try_fold(0, |n, b| b.map(|b| n + b as usize));
    let lock_stats = if label.starts_with("bravo") {
        stats.snapshot()
    } else {
        LockStats::default()
    };
    Ok(BenchResult::new(
        cfg, label, reports, elapsed, lock_stats, biased,
    ))
}

fn dispatch<W: Workload + Sync>(
    cfg: &BenchConfig,
    workload: &W,
    private_tables: bool,
) -> Result<BenchResult, BenchError> {
    let env = LockEnv::new(cfg, private_tables);
    let n = cfg.lock_pool;
    let mut label = cfg.lock_impl.to_string();
    if private_tables {
        label.push_str("-private");
    }
    match cfg.lock_impl {
        LockImpl::Centralized => execute(
            cfg,
            label,
            workload,
            build_pool(n, CentralizedLock::new),
            &env.stats,
        ),
        LockImpl::Distributed => execute(
            cfg,
            label,
            workload,
            build_pool(n, || DistributedLock::with_sublocks(env.sublocks)),
            &env.stats,
        ),
        LockImpl::BravoCentralized => execute(
            cfg,
            label,
            workload,
            build_pool(n, || env.bravo(CentralizedLock::new())),
            &env.stats,
        ),
        LockImpl::BravoDistributed => execute(
            cfg,
            label,
            workload,
            build_pool(n, || {
                env.bravo(DistributedLock::with_sublocks(env.sublocks))
            }),
            &env.stats,
        ),
    }
}

struct Alternator {
    flags: Vec<Sector<AtomicBool>>,
}

impl Workload for Alternator {
    fn run<L: BenchLock>(
        &self,
        _cfg: &BenchConfig,
        pool: &[Sector<GuardedCounter<L>>],
        control: &Control,
        t: usize,
    ) -> ThreadReport {
        let mut report = ThreadReport::default();
        let right = (t + 1) % self.flags.len();
        let lock = &pool[0];
        'ring: while control.running() {
            let mut backoff = Backoff::new();
            while !self.flags[t].load(Ordering::Acquire) {
                if !control.running() {
                    break 'ring;
                }
                backoff.snooze();
            }
            self.flags[t].store(false, Ordering::Relaxed);
            if let Err(torn) = lock.read(|| {}) {
                control.torn(t, 0, torn);
            }
            report.ops += 1;
            report.reads += 1;
            self.flags[right].store(true, Ordering::Release);
        }
        report
    }
}

/// Workload shape of `test_rwlock T 1 10 -c 10 -e 10 -d 1000`.
struct TestRwLock;

const TESTRW_WRITER_CS: u32 = 10;
const TESTRW_WRITER_NCS: u32 = 1000;
const TESTRW_READER_CS: u32 = 10;

impl Workload for TestRwLock {
    fn run<L: BenchLock>(
        &self,
        _cfg: &BenchConfig,
        pool: &[Sector<GuardedCounter<L>>],
        control: &Control,
        t: usize,
    ) -> ThreadReport {
        let mut report = ThreadReport::default();
        let lock = &pool[0];
        if t == 0 {
            while control.running() {
                lock.write(|| spin_work(TESTRW_WRITER_CS));
                report.ops += 1;
                report.writes += 1;
                spin_work(TESTRW_WRITER_NCS);
            }
        } else {
            while control.running() {
                if let Err(torn) = lock.read(|| spin_work(TESTRW_READER_CS)) {
                    control.torn(t, 0, torn);
                }
                report.ops += 1;
                report.reads += 1;
            }
        }
        report
    }
}

struct RwBench;

const RWBENCH_CS_STEPS: u32 = 10;
const RWBENCH_NCS_MAX: u32 = 200;

impl Workload for RwBench {
    fn run<L: BenchLock>(
        &self,
        cfg: &BenchConfig,
        pool: &[Sector<GuardedCounter<L>>],
        control: &Control,
        t: usize,
    ) -> ThreadReport {
        let mut report = ThreadReport::default();
        let mut rng = worker_rng(cfg.seed, t);
        let lock = &pool[0];
        while control.running() {
            let write = rng.random_bool(cfg.write_prob);
            if write {
                lock.write(|| advance(&mut rng, RWBENCH_CS_STEPS));
                report.writes += 1;
            } else {
                if let Err(torn) = lock.read(|| advance(&mut rng, RWBENCH_CS_STEPS)) {
                    control.torn(t, 0, torn);
                }
                report.reads += 1;
            }
            let ncs = rng.random_range(0..RWBENCH_NCS_MAX);
            report.note((ncs as u64) << 1 | write as u64);
            advance(&mut rng, ncs);
            report.ops += 1;
        }
        report
    }
}

struct Interference;

const INTERFERENCE_CS_STEPS: u32 = 20;
const INTERFERENCE_NCS_STEPS: u32 = 100;

impl Workload for Interference {
    fn run<L: BenchLock>(
        &self,
        cfg: &BenchConfig,
        pool: &[Sector<GuardedCounter<L>>],
        control: &Control,
        t: usize,
    ) -> ThreadReport {
        let mut report = ThreadReport::default();
        let mut rng = worker_rng(cfg.seed, t);
        while control.running() {
            let pick = rng.random_range(0..pool.len());
            report.note(pick as u64);
            if let Err(torn) = pool[pick].read(|| advance(&mut rng, INTERFERENCE_CS_STEPS)) {
                control.torn(t, pick, torn);
            }
            advance(&mut rng, INTERFERENCE_NCS_STEPS);
            report.ops += 1;
            report.reads += 1;
        }
        report
    }
}

fn single_lock(cfg: &BenchConfig) -> BenchConfig {
    let mut cfg = cfg.clone();
    cfg.lock_pool = 1;
    cfg
}

/// Alternator: threads form a ring and pass a notification flag around;
/// each notified thread takes and drops read permission on one lock.
pub fn run_alternator(cfg: &BenchConfig) -> Result<BenchResult, BenchError> {
    cfg.expect(Benchmark::Alternator)?;
    let cfg = single_lock(cfg);
    let flags: Vec<Sector<AtomicBool>> = (0..cfg.threads)
        .map(|t| Sector::new(AtomicBool::new(t == 0)))
        .collect();
    dispatch(&cfg, &Alternator { flags }, false)
}

/// test_rwlock: thread 0 is a writer (10 work units inside, 1000 outside),
/// the other `threads - 1` are readers (10 units inside).
pub fn run_testrwlock(cfg: &BenchConfig) -> Result<BenchResult, BenchError> {
    cfg.expect(Benchmark::Testrwlock)?;
    dispatch(&single_lock(cfg), &TestRwLock, false)
}

/// RWBench: each operation is a write with probability `write_prob`, holds
/// the lock for 10 generator steps and then runs `[0, 200)` steps outside.
pub fn run_rwbench(cfg: &BenchConfig) -> Result<BenchResult, BenchError> {
    cfg.expect(Benchmark::Rwbench)?;
    dispatch(&single_lock(cfg), &RwBench, false)
}

/// Interference run against the shared table and, for BRAVO locks, against
/// the same locks each owning a private table.
#[derive(Debug, Clone)]
pub struct InterferenceOutcome {
    pub shared: BenchResult,
    pub private: Option<BenchResult>,
}

impl InterferenceOutcome {
    /// Shared-table throughput over private-table throughput.
    pub fn ratio(&self) -> Option<f64> {
        self.private
            .as_ref()
            .map(|p| self.shared.ops_per_sec / p.ops_per_sec)
    }
}

/// Interference: read-only acquisitions of randomly picked locks from a pool
/// of `lock_pool`, 20 generator steps inside, 100 outside.
pub fn run_interference(cfg: &BenchConfig) -> Result<InterferenceOutcome, BenchError> {
    cfg.expect(Benchmark::Interference)?;
    let shared = run_interference_shared(cfg)?;
    let private = if cfg.lock_impl.is_bravo() {
        Some(dispatch(cfg, &Interference, true)?)
    } else {
        None
    };
    Ok(InterferenceOutcome { shared, private })
}

/// Interference against the shared table only.
pub fn run_interference_shared(cfg: &BenchConfig) -> Result<BenchResult, BenchError> {
    cfg.expect(Benchmark::Interference)?;
    dispatch(cfg, &Interference, false)
}

/// Runs whichever benchmark `cfg` names. Interference yields the shared and
/// private-table results.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchResult>, BenchError> {
    Ok(match cfg.benchmark {
        Benchmark::Alternator => vec![run_alternator(cfg)?],
        Benchmark::Testrwlock => vec![run_testrwlock(cfg)?],
        Benchmark::Rwbench => vec![run_rwbench(cfg)?],
        Benchmark::Interference => {
            let o = run_interference(cfg)?;
            std::iter::once(o.shared).chain(o.private).collect()
        }
    })
}

/// `reps` repetitions of [`run`], numbered by `run_index`.
pub fn run_repeated(cfg: &BenchConfig, reps: usize) -> Result<Vec<BenchResult>, BenchError> {
    let mut all = Vec::new();
    for rep in 0..reps {
        for mut r in run(cfg)? {
            r.run_index = rep;
            all.push(r);
        }
    }
    Ok(all)
}

/// Median of `reps` runs for each lock label in the output of [`run`].
pub fn run_median(cfg: &BenchConfig, reps: usize) -> Result<Vec<BenchResult>, BenchError> {
    let all = run_repeated(cfg, reps)?;
    let mut labels: Vec<&str> = all.iter().map(|r| r.lock_label.as_str()).collect();
    labels.dedup();
    labels.truncate(all.len() / reps.max(1));
    Ok(labels
        .iter()
        .filter_map(|l| {
            let runs: Vec<BenchResult> =
                all.iter().filter(|r| r.lock_label == *l).cloned().collect();
            median(&runs)
        })
        .collect())
}
