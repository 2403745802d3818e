// SPDX-License-Identifier: Apache-2.0

use std::sync::atomic::{AtomicU64, Ordering};

use crate::backoff::Backoff;
use crate::raw::RawRwLock;

const READER: u64 = 1;
const READER_MASK: u64 = (1 << 62) - 1;
const WRITER_PRESENT: u64 = 1 << 62;
const WRITER_WAITING: u64 = 1 << 63;

/// Attempts a try operation makes before giving up on a word that keeps
/// changing under it.
const TRY_ATTEMPTS: usize = 8;

/// Compact writer-preferring reader-writer lock.
///
/// The whole lock is one 64-bit word: the reader count in the low bits, a
/// writer-present bit and a writer-waiting bit. Every reader arrival and
/// departure writes the shared word, which is exactly the coherence traffic a
/// [`BravoLock`](crate::BravoLock) fast path avoids.
///
/// Waiting writers set the writer-waiting bit, which holds back newly arriving
/// readers until the writer gets in.
#[derive(Debug, Default)]
pub struct CentralizedLock {
    state: AtomicU64,
}

/// Decoded view of a [`CentralizedLock`] word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CentralizedState {
    pub readers: u64,
    pub writer_present: bool,
    pub writer_waiting: bool,
}

impl CentralizedLock {
    pub const fn new() -> Self {
        CentralizedLock {
            state: AtomicU64::new(0),
        }
    }

    /// Racy snapshot of the lock word, for instrumentation and tests.
    pub fn state(&self) -> CentralizedState {
        let s = self.state.load(Ordering::Relaxed);
        CentralizedState {
            readers: s & READER_MASK,
            writer_present: s & WRITER_PRESENT != 0,
            writer_waiting: s & WRITER_WAITING != 0,
        }
    }

    fn read_lock_slow(&self) {
        let mut backoff = Backoff::new();
        loop {
            let s = self.state.load(Ordering::Relaxed);
            if s & (WRITER_PRESENT | WRITER_WAITING) == 0 {
                if self
                    .state
                    .compare_exchange_weak(s, s + READER, Ordering::Acquire, Ordering::Relaxed)
                    .is_ok()
                {
                    return;
                }
                continue;
            }
            backoff.snooze();
        }
    }
}

unsafe impl RawRwLock for CentralizedLock {
    type ReadToken = ();

    #[inline]
    fn read_lock(&self) {
        let s = self.state.load(Ordering::Relaxed);
        if s & (WRITER_PRESENT | WRITER_WAITING) == 0
            && self
                .state
                .compare_exchange_weak(s, s + READER, Ordering::Acquire, Ordering::Relaxed)
                .is_ok()
        {
            return;
        }
        self.read_lock_slow();
    }

    fn try_read_lock(&self) -> Option<()> {
        let mut s = self.state.load(Ordering::Relaxed);
        for _ in 0..TRY_ATTEMPTS {
            if s & (WRITER_PRESENT | WRITER_WAITING) != 0 {
                return None;
            }
            match self.state.compare_exchange_weak(
                s,
                s + READER,
                Ordering::Acquire,
                Ordering::Relaxed,
            ) {
                Ok(_) => return Some(()),
                Err(actual) => s = actual,
            }
        }
        None
    }

    #[inline]
    unsafe fn read_unlock(&self, _token: ()) {
        let prev = self.state.fetch_sub(READER, Ordering::Release);
        debug_assert!(
            prev & READER_MASK != 0,
            "read_unlock on a CentralizedLock with no readers"
        );
    }

    fn write_lock(&self) {
        let mut backoff = Backoff::new();
        loop {
            let s = self.state.load(Ordering::Relaxed);
            if s & (READER_MASK | WRITER_PRESENT) == 0 {
                // Entering clears writer-waiting; other queued writers set it
                // again on their next pass.
                if self
                    .state
                    .compare_exchange_weak(s, WRITER_PRESENT, Ordering::Acquire, Ordering::Relaxed)
                    .is_ok()
                {
                    return;
                }
                continue;
            }
            if s & WRITER_WAITING == 0 {
                self.state.fetch_or(WRITER_WAITING, Ordering::Relaxed);
            }
            backoff.snooze();
        }
    }

    fn try_write_lock(&self) -> bool {
        let mut s = self.state.load(Ordering::Relaxed);
        for _ in 0..TRY_ATTEMPTS {
            if s & (READER_MASK | WRITER_PRESENT) != 0 {
                return false;
            }
            // Keep a writer-waiting bit owned by some blocked writer.
            match self.state.compare_exchange_weak(
                s,
                s | WRITER_PRESENT,
                Ordering::Acquire,
                Ordering::Relaxed,
            ) {
                Ok(_) => return true,
                Err(actual) => s = actual,
            }
        }
        false
    }

    #[inline]
    unsafe fn write_unlock(&self) {
        let prev = self.state.fetch_and(!WRITER_PRESENT, Ordering::Release);
        debug_assert!(
            prev & WRITER_PRESENT != 0,
            "write_unlock on a CentralizedLock that is not write-held"
        );
    }
}
