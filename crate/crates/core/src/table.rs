// SPDX-License-Identifier: Apache-2.0

use std::num::NonZeroU64;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::backoff::Backoff;

/// Slot count of the global table unless `BRAVO_TABLE_SIZE` says otherwise.
pub const DEFAULT_TABLE_SIZE: usize = 4096;

/// Environment variable overriding the global table size.
pub const TABLE_SIZE_ENV: &str = "BRAVO_TABLE_SIZE";

const EMPTY: u64 = 0;
const SLOTS_PER_LINE: usize = 16;

static NEXT_LOCK_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a lock instance as published in the visible readers table.
///
/// Ids come from a process-wide counter, are never zero (zero marks an empty
/// slot) and are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LockId(NonZeroU64);

impl LockId {
    /// Allocates a fresh id.
    pub fn next() -> Self {
        let raw = NEXT_LOCK_ID.fetch_add(1, Ordering::Relaxed);
        LockId(NonZeroU64::new(raw).expect("lock id counter wrapped"))
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }

    /// Rebuilds an id from its raw value, e.g. to exercise [`hash_slot`].
    /// Publishing a forged id of a live lock would stall its writers.
    pub fn from_raw(raw: u64) -> Option<LockId> {
        NonZeroU64::new(raw).map(LockId)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("table size {0} is not a nonzero power of two")]
    InvalidSize(usize),
}

#[repr(align(128))]
struct SlotLine([AtomicU64; SLOTS_PER_LINE]);

/// Fixed-size array of slots where fast-path readers publish the [`LockId`]
/// of the lock they hold.
///
/// One instance ([`VisibleReadersTable::global`]) is shared by every lock and
/// thread in the process. Slots are plain machine words packed 16 to a
/// 128-byte sector; the table itself is sector aligned.
pub struct VisibleReadersTable {
    lines: Box<[SlotLine]>,
    mask: usize,
}

impl std::fmt::Debug for VisibleReadersTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VisibleReadersTable")
            .field("len", &self.len())
            .field("occupied", &self.occupancy())
            .finish()
    }
}

impl VisibleReadersTable {
    pub fn new(len: usize) -> Result<Self, TableError> {
        if !len.is_power_of_two() {
            return Err(TableError::InvalidSize(len));
        }
        let lines = len.div_ceil(SLOTS_PER_LINE);
        Ok(VisibleReadersTable {
            lines: (0..lines)
                .map(|_| SlotLine(std::array::from_fn(|_| AtomicU64::new(EMPTY))))
                .collect(),
            mask: len - 1,
        })
    }

    /// The process-wide table, created on first use with
    /// [`DEFAULT_TABLE_SIZE`] slots or the size given in `BRAVO_TABLE_SIZE`.
    pub fn global() -> &'static Arc<VisibleReadersTable> {
        static GLOBAL: OnceLock<Arc<VisibleReadersTable>> = OnceLock::new();
        GLOBAL.get_or_init(|| {
            let len = match std::env::var(TABLE_SIZE_ENV) {
                Ok(v) => match v.trim().parse::<usize>() {
                    Ok(n) if n.is_power_of_two() => n,
                    _ => {
                        eprintln!("bravo: ignoring {TABLE_SIZE_ENV}={v:?}, need a power of two");
                        DEFAULT_TABLE_SIZE
                    }
                },
                Err(_) => DEFAULT_TABLE_SIZE,
            };
            Arc::new(VisibleReadersTable::new(len).expect("validated table size"))
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mask + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub(crate) fn slot(&self, index: usize) -> &AtomicU64 {
        &self.lines[index / SLOTS_PER_LINE].0[index % SLOTS_PER_LINE]
    }

    fn slots(&self) -> impl Iterator<Item = &AtomicU64> {
        self.lines
            .iter()
            .flat_map(|line| line.0.iter())
            .take(self.len())
    }

    /// Slot a given thread uses for a given lock.
    #[inline]
    pub fn index_for(&self, thread_index: usize, lock: LockId) -> usize {
        hash_slot(thread_index, lock, self.len())
    }

    /// Current content of a slot.
    pub fn load(&self, index: usize) -> Option<LockId> {
        NonZeroU64::new(self.slot(index).load(Ordering::SeqCst)).map(LockId)
    }

    #[inline]
    pub(crate) fn try_install(&self, index: usize, lock: LockId) -> bool {
        self.slot(index)
            .compare_exchange(EMPTY, lock.get(), Ordering::SeqCst, Ordering::Relaxed)
            .is_ok()
    }

    #[inline]
    pub(crate) fn clear(&self, index: usize, lock: LockId) {
        debug_assert_eq!(
            self.slot(index).load(Ordering::Relaxed),
            lock.get(),
            "slot {index} does not hold {lock:?}: reader token released twice or on the wrong lock"
        );
        self.slot(index).store(EMPTY, Ordering::Release);
    }

    /// Number of occupied slots. Racy unless the table is quiescent.
    pub fn occupancy(&self) -> usize {
        self.slots()
            .filter(|s| s.load(Ordering::Relaxed) != EMPTY)
            .count()
    }

    /// Indices currently holding `lock`.
    pub fn positions_of(&self, lock: LockId) -> Vec<usize> {
        self.slots()
            .enumerate()
            .filter(|(_, s)| s.load(Ordering::SeqCst) == lock.get())
            .map(|(i, _)| i)
            .collect()
    }

    /// Full scan that waits on every slot holding `lock` until it is
    /// cleared. Waiting backs off to yielding, as the reader may have been
    /// preempted.
    pub(crate) fn wait_until_absent(&self, lock: LockId) {
        let id = lock.get();
        for slot in self.slots() {
            let mut backoff = Backoff::new();
            while slot.load(Ordering::SeqCst) == id {
                backoff.snooze();
            }
        }
    }

    /// Full scan without waiting; true if any slot holds `lock`.
    pub(crate) fn contains(&self, lock: LockId) -> bool {
        let id = lock.get();
        // No early exit: the cost stays that of a full revocation scan.
        self.slots().fold(false, |found, slot| {
            found | (slot.load(Ordering::SeqCst) == id)
        })
    }

    /// Occupies a slot with a fresh id that belongs to no lock, as a
    /// colliding reader of another lock would. The slot is freed on drop.
    pub fn occupy(&self, index: usize) -> Option<Occupied<'_>> {
        let id = LockId::next();
        self.try_install(index & self.mask, id).then(|| Occupied {
            table: self,
            index: index & self.mask,
            id,
        })
    }
}

/// Slot held by [`VisibleReadersTable::occupy`].
#[derive(Debug)]
pub struct Occupied<'a> {
    table: &'a VisibleReadersTable,
    index: usize,
    id: LockId,
}

impl Occupied<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn id(&self) -> LockId {
        self.id
    }
}

impl Drop for Occupied<'_> {
    fn drop(&mut self) {
        self.table.clear(self.index, self.id);
    }
}

/// 64-bit avalanche finalizer (MurmurHash3 `fmix64`).
#[inline]
fn mix(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^ (k >> 33)
}

/// Visible-readers slot for `thread_index` reading `lock` in a table of
/// `table_len` slots (a power of two).
///
/// The thread index and the rotated lock id are combined into one word and
/// run through an avalanche mixer, then masked to the table size.
#[inline]
pub fn hash_slot(thread_index: usize, lock: LockId, table_len: usize) -> usize {
    debug_assert!(table_len.is_power_of_two());
    mix(thread_index as u64 ^ lock.get().rotate_left(32)) as usize & (table_len - 1)
}
