// SPDX-License-Identifier: Apache-2.0

use std::cell::Cell;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use crate::centralized::CentralizedLock;
use crate::clock::now_ns;
use crate::raw::RawRwLock;
use crate::stats::{Event, RevocationRecord, Stats};
use crate::table::{LockId, VisibleReadersTable};
use crate::thread;

/// Environment variable overriding the default inhibit multiplier.
pub const MULTIPLIER_ENV: &str = "BRAVO_N";

/// Bias policy.
///
/// After a writer revokes reader bias it measures how long the revocation
/// took (scan plus waiting for readers) and keeps bias disabled for
/// `multiplier` times that long. Writers therefore spend at most about
/// `1 / (multiplier + 1)` of their time revoking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Policy {
    pub multiplier: u64,
}

impl Policy {
    pub const DEFAULT_MULTIPLIER: u64 = 9;

    pub const fn new(multiplier: u64) -> Self {
        Policy { multiplier }
    }

    /// The default policy, honoring `BRAVO_N` (read once per process).
    pub fn from_env() -> Self {
        static POLICY: OnceLock<Policy> = OnceLock::new();
        *POLICY.get_or_init(|| match std::env::var(MULTIPLIER_ENV) {
            Ok(v) => match v.trim().parse() {
                Ok(n) => Policy::new(n),
                Err(_) => {
                    eprintln!("bravo: ignoring {MULTIPLIER_ENV}={v:?}, need an integer >= 0");
                    Policy::default()
                }
            },
            Err(_) => Policy::default(),
        })
    }
}

impl Default for Policy {
    fn default() -> Self {
        Policy::new(Self::DEFAULT_MULTIPLIER)
    }
}

/// Slow reads per thread between clock reads while bias is inhibited.
pub const CLOCK_CHECK_INTERVAL: u32 = 8;

#[inline]
fn clock_check_due() -> bool {
    std::thread_local! {
        static SLOW_READS: Cell<u32> = const { Cell::new(0) };
    }
    SLOW_READS.with(|c| {
        let n = c.get().wrapping_add(1);
        c.set(n);
        n % CLOCK_CHECK_INTERVAL == 0
    })
}

/// Proof of read permission on a [`BravoLock`].
///
/// Records whether the fast path was taken (and which slot was published)
/// or the underlying lock granted permission, in which case it carries the
/// underlying lock's own token.
#[must_use = "a reader token must be passed back to read_unlock"]
pub struct ReaderToken<T> {
    kind: TokenKind<T>,
}

enum TokenKind<T> {
    Fast(usize),
    Slow(T),
}

impl<T> ReaderToken<T> {
    pub fn is_fast(&self) -> bool {
        matches!(self.kind, TokenKind::Fast(_))
    }

    /// Published slot of a fast-path token.
    pub fn slot(&self) -> Option<usize> {
        match self.kind {
            TokenKind::Fast(slot) => Some(slot),
            TokenKind::Slow(_) => None,
        }
    }
}

impl<T> fmt::Debug for ReaderToken<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Fast(slot) => f.debug_tuple("FastPath").field(&slot).finish(),
            TokenKind::Slow(_) => f.write_str("SlowPath"),
        }
    }
}

/// Result of the first step of a fast-path read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Publish {
    /// The lock id was installed in this slot; call
    /// [`BravoLock::confirm`] next.
    Installed(usize),
    /// Reader bias was off.
    BiasOff,
    /// The slot already held another publication.
    Collision(usize),
}

/// Reader-writer lock `L` with a biased reader fast path.
///
/// While reader bias is on, readers publish the lock's id into a slot of the
/// visible readers table chosen by hashing their thread index with the lock
/// id, and never touch `L`. Readers that find bias off, collide on their
/// slot, or lose a race with a revoking writer fall back to `L`. Writers
/// always acquire `L`; if bias was on they switch it off and wait until no
/// slot holds this lock.
///
/// Only readers holding read permission through `L` re-enable bias, and only
/// once the inhibit window set by the last revocation has passed.
///
/// Tokens may be released from a thread other than the acquirer.
pub struct BravoLock<L: RawRwLock = CentralizedLock> {
    rbias: AtomicBool,
    inhibit_until: AtomicU64,
    id: LockId,
    multiplier: u64,
    table: Arc<VisibleReadersTable>,
    stats: Option<Arc<Stats>>,
    underlying: L,
}

impl<L: RawRwLock + Default> BravoLock<L> {
    /// Wraps a default `L`, using the global table and default policy.
    pub fn new() -> Self {
        Self::with_underlying(L::default())
    }
}

impl<L: RawRwLock + Default> Default for BravoLock<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: RawRwLock> BravoLock<L> {
    pub fn with_underlying(underlying: L) -> Self {
        BravoLock {
            rbias: AtomicBool::new(false),
            inhibit_until: AtomicU64::new(0),
            id: LockId::next(),
            multiplier: Policy::from_env().multiplier,
            table: Arc::clone(VisibleReadersTable::global()),
            stats: None,
            underlying,
        }
    }

    /// Publishes readers into `table` instead of the global one.
    pub fn with_table(mut self, table: Arc<VisibleReadersTable>) -> Self {
        self.table = table;
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.multiplier = policy.multiplier;
        self
    }

    pub fn with_stats(mut self, stats: Arc<Stats>) -> Self {
        self.stats = Some(stats);
        self
    }

    pub fn id(&self) -> LockId {
        self.id
    }

    pub fn table(&self) -> &Arc<VisibleReadersTable> {
        &self.table
    }

    pub fn policy(&self) -> Policy {
        Policy::new(self.multiplier)
    }

    pub fn stats(&self) -> Option<&Arc<Stats>> {
        self.stats.as_ref()
    }

    pub fn underlying(&self) -> &L {
        &self.underlying
    }

    /// Whether reader bias is currently on.
    pub fn is_biased(&self) -> bool {
        self.rbias.load(Ordering::SeqCst)
    }

    /// Monotonic time before which slow-path readers leave bias off.
    pub fn inhibit_until_ns(&self) -> u64 {
        self.inhibit_until.load(Ordering::Relaxed)
    }

    /// Slot a reader with `thread_index` publishes into.
    pub fn slot_for(&self, thread_index: usize) -> usize {
        self.table.index_for(thread_index, self.id)
    }

    #[inline]
    fn record(&self, event: Event) {
        if let Some(stats) = &self.stats {
            stats.record(event);
        }
    }

    /// First fast-path step: if bias is on, try to install this lock's id in
    /// the reader's slot. Constant time.
    #[inline]
    pub fn publish(&self, thread_index: usize) -> Publish {
        if !self.rbias.load(Ordering::Relaxed) {
            return Publish::BiasOff;
        }
        let slot = self.table.index_for(thread_index, self.id);
        if self.table.try_install(slot, self.id) {
            Publish::Installed(slot)
        } else {
            Publish::Collision(slot)
        }
    }

    /// Second fast-path step: recheck bias after installing into `slot`.
    ///
    /// Returns true if the reader now holds read permission. Otherwise a
    /// writer has started revoking; the slot is cleared again and the reader
    /// must use the slow path.
    ///
    /// The install and this load are both sequentially consistent, as are the
    /// writer's bias-clearing store and scan loads: either the reader sees
    /// bias cleared, or the writer's scan sees the installed slot.
    #[inline]
    pub fn confirm(&self, slot: usize) -> bool {
        if self.rbias.load(Ordering::SeqCst) {
            true
        } else {
            self.table.clear(slot, self.id);
            false
        }
    }

    /// Re-enables bias if the inhibit window has passed. Caller holds read
    /// permission on the underlying lock, so no writer can be revoking.
    ///
    /// Reading the clock costs about as much as the rest of a slow read, so
    /// inside a window a thread only looks at it on every
    /// [`CLOCK_CHECK_INTERVAL`]th slow read. Bias can come back a few reads
    /// late, never early. Without a window (no revocation yet, or a zero
    /// multiplier) no clock is needed.
    #[inline]
    fn maybe_enable_bias(&self) {
        if self.rbias.load(Ordering::Relaxed) {
            return;
        }
        let until = self.inhibit_until.load(Ordering::Relaxed);
        if until == 0 || self.multiplier == 0 || (clock_check_due() && now_ns() >= until) {
            self.rbias.store(true, Ordering::Relaxed);
        }
    }

    #[inline]
    fn try_fast_path(&self, thread_index: usize) -> Option<ReaderToken<L::ReadToken>> {
        match self.publish(thread_index) {
            Publish::Installed(slot) => {
                if self.confirm(slot) {
                    self.record(Event::FastRead);
                    return Some(ReaderToken {
                        kind: TokenKind::Fast(slot),
                    });
                }
            }
            Publish::Collision(_) => self.record(Event::CasFailure),
            Publish::BiasOff => {}
        }
        None
    }

    /// Read acquisition on behalf of `thread_index`, which selects the slot.
    #[inline]
    pub fn read_lock_as(&self, thread_index: usize) -> ReaderToken<L::ReadToken> {
        if let Some(token) = self.try_fast_path(thread_index) {
            return token;
        }
        let inner = self.underlying.read_lock();
        self.maybe_enable_bias();
        self.record(Event::SlowRead);
        ReaderToken {
            kind: TokenKind::Slow(inner),
        }
    }

    pub fn try_read_lock_as(&self, thread_index: usize) -> Option<ReaderToken<L::ReadToken>> {
        if let Some(token) = self.try_fast_path(thread_index) {
            return Some(token);
        }
        let inner = self.underlying.try_read_lock()?;
        self.maybe_enable_bias();
        self.record(Event::SlowRead);
        Some(ReaderToken {
            kind: TokenKind::Slow(inner),
        })
    }

    /// Clears bias and scans for readers of this lock. With `wait`, spins on
    /// each matching slot until it is released; without, gives up at the
    /// first sign of a fast reader and returns `None`.
    fn revoke(&self, wait: bool) -> Option<RevocationRecord> {
        let start_ns = now_ns();
        self.rbias.store(false, Ordering::SeqCst);
        if wait {
            self.table.wait_until_absent(self.id);
        } else if self.table.contains(self.id) {
            return None;
        }
        let end_ns = now_ns();
        let window = (end_ns - start_ns).saturating_mul(self.multiplier);
        let record = RevocationRecord {
            lock: self.id,
            start_ns,
            end_ns,
            inhibit_until_ns: end_ns.saturating_add(window),
            multiplier: self.multiplier,
        };
        self.inhibit_until
            .store(record.inhibit_until_ns, Ordering::Relaxed);
        Some(record)
    }
}

unsafe impl<L: RawRwLock> RawRwLock for BravoLock<L> {
    type ReadToken = ReaderToken<L::ReadToken>;

    #[inline]
    fn read_lock(&self) -> Self::ReadToken {
        self.read_lock_as(thread::current_index())
    }

    fn try_read_lock(&self) -> Option<Self::ReadToken> {
        self.try_read_lock_as(thread::current_index())
    }

    #[inline]
    unsafe fn read_unlock(&self, token: Self::ReadToken) {
        match token.kind {
            TokenKind::Fast(slot) => self.table.clear(slot, self.id),
            TokenKind::Slow(inner) => self.underlying.read_unlock(inner),
        }
    }

    fn write_lock(&self) {
        self.underlying.write_lock();
        if self.rbias.load(Ordering::Relaxed) {
            let record = self.revoke(true).expect("waiting revocation completes");
            self.record(Event::Revocation(record));
        }
        self.record(Event::WriteAcquire);
    }

    /// Tries the underlying lock, then revokes bias if it was on. Never waits
    /// for fast-path readers: if the scan finds one, bias is put back, the
    /// underlying lock is released and the attempt fails.
    fn try_write_lock(&self) -> bool {
        if !self.underlying.try_write_lock() {
            return false;
        }
        if self.rbias.load(Ordering::Relaxed) {
            match self.revoke(false) {
                Some(record) => self.record(Event::Revocation(record)),
                None => {
                    // A fast reader is still inside. Later writers must find
                    // bias set so they wait for it.
                    self.rbias.store(true, Ordering::SeqCst);
                    unsafe { self.underlying.write_unlock() };
                    return false;
                }
            }
        }
        self.record(Event::WriteAcquire);
        true
    }

    #[inline]
    unsafe fn write_unlock(&self) {
        self.underlying.write_unlock();
    }
}

impl<L: RawRwLock + fmt::Debug> fmt::Debug for BravoLock<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BravoLock")
            .field("id", &self.id)
            .field("rbias", &self.rbias.load(Ordering::Relaxed))
            .field("inhibit_until", &self.inhibit_until_ns())
            .field("multiplier", &self.multiplier)
            .field("underlying", &self.underlying)
            .finish()
    }
}
