// SPDX-License-Identifier: Apache-2.0

//! Guarded-counter mutual exclusion oracle.
//!
//! Writers increment a plain (non-atomic) counter under write permission with
//! a gap between load and store; readers load it twice under read permission
//! with work in between. A reader that sees two different values, or a final
//! count that differs from the number of write sections, means the lock let a
//! writer overlap someone else.

use std::cell::UnsafeCell;
use std::ptr;

use crate::raw::RawRwLock;

/// Lock plus the counter it guards.
pub struct GuardedCounter<L> {
    lock: L,
    value: UnsafeCell<u64>,
}

// SAFETY: the counter is only touched under the lock's permissions; a broken
// lock is precisely what the oracle exists to detect.
unsafe impl<L: Sync> Sync for GuardedCounter<L> {}

/// Two different reads inside one read-side critical section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TornRead {
    pub first: u64,
    pub second: u64,
}

impl<L: RawRwLock> GuardedCounter<L> {
    pub fn new(lock: L) -> Self {
        GuardedCounter {
            lock,
            value: UnsafeCell::new(0),
        }
    }

    pub fn lock(&self) -> &L {
        &self.lock
    }

    /// Increments the counter under write permission, running `work` between
    /// the load and the store.
    #[inline]
    pub fn write<F: FnOnce()>(&self, work: F) {
        self.lock.write_lock();
        // SAFETY: write permission held.
        unsafe {
            let v = ptr::read_volatile(self.value.get());
            work();
            ptr::write_volatile(self.value.get(), v + 1);
            self.lock.write_unlock();
        }
    }

    /// Reads the counter twice under read permission with `work` in between.
    #[inline]
    pub fn read<F: FnOnce()>(&self, work: F) -> Result<(), TornRead> {
        let token = self.lock.read_lock();
        // SAFETY: read permission held; the token is ours.
        let (first, second) = unsafe {
            let first = ptr::read_volatile(self.value.get());
            work();
            let second = ptr::read_volatile(self.value.get());
            self.lock.read_unlock(token);
            (first, second)
        };
        if first == second {
            Ok(())
        } else {
            Err(TornRead { first, second })
        }
    }

    /// Counter value. Only meaningful once no thread uses the lock.
    pub fn value(&mut self) -> u64 {
        *self.value.get_mut()
    }

    /// Counter value through a shared reference, taken under write permission.
    pub fn value_locked(&self) -> u64 {
        self.lock.write_lock();
        // SAFETY: write permission held.
        unsafe {
            let v = ptr::read_volatile(self.value.get());
            self.lock.write_unlock();
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CentralizedLock;

    /// A "lock" that grants everything, to prove the oracle can fire.
    #[derive(Default)]
    struct NoLock;

    unsafe impl RawRwLock for NoLock {
        type ReadToken = ();
        fn read_lock(&self) {}
        fn try_read_lock(&self) -> Option<()> {
            Some(())
        }
        unsafe fn read_unlock(&self, _: ()) {}
        fn write_lock(&self) {}
        fn try_write_lock(&self) -> bool {
            true
        }
        unsafe fn write_unlock(&self) {}
    }

    #[test]
    fn sequential_use_is_clean() {
        let mut g = GuardedCounter::new(CentralizedLock::new());
        for _ in 0..10 {
            g.write(|| {});
            g.read(|| {}).unwrap();
        }
        assert_eq!(g.value_locked(), 10);
        assert_eq!(g.value(), 10);
    }

    #[test]
    fn detects_torn_read() {
        let g = GuardedCounter::new(NoLock);
        let err = g.read(|| g.write(|| {})).unwrap_err();
        assert_eq!(
            err,
            TornRead {
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn detects_lost_update() {
        let mut g = GuardedCounter::new(NoLock);
        let inner = &g;
        inner.write(|| inner.write(|| {}));
        // Two write sections, one surviving increment.
        assert_eq!(g.value(), 1);
    }
}
