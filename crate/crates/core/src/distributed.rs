// SPDX-License-Identifier: Apache-2.0

use std::num::NonZeroUsize;

use crate::centralized::{CentralizedLock, CentralizedState};
use crate::raw::RawRwLock;
use crate::sector::Sector;
use crate::thread;

/// Per-CPU style reader-writer lock.
///
/// Holds one [`CentralizedLock`] per slot, each in its own cache sector. A
/// reader takes read permission on the sublock selected by its thread index;
/// a writer takes write permission on every sublock in ascending order and
/// releases in descending order. Readers scale, but the lock grows with the
/// machine and writers pay for every sublock.
#[derive(Debug)]
pub struct DistributedLock {
    sublocks: Box<[Sector<CentralizedLock>]>,
}

impl DistributedLock {
    /// One sublock per logical CPU.
    pub fn new() -> Self {
        let cpus = std::thread::available_parallelism().map_or(1, NonZeroUsize::get);
        Self::with_sublocks(NonZeroUsize::new(cpus).unwrap_or(NonZeroUsize::MIN))
    }

    pub fn with_sublocks(count: NonZeroUsize) -> Self {
        DistributedLock {
            sublocks: (0..count.get())
                .map(|_| Sector::new(CentralizedLock::new()))
                .collect(),
        }
    }

    pub fn sublock_count(&self) -> usize {
        self.sublocks.len()
    }

    /// Sublock a reader with the given thread index uses.
    #[inline]
    pub fn sublock_for(&self, thread_index: usize) -> usize {
        thread_index % self.sublocks.len()
    }

    pub fn sublock_state(&self, index: usize) -> CentralizedState {
        self.sublocks[index].state()
    }

    /// Read acquisition on behalf of an explicit thread index. The returned
    /// token is the sublock index.
    pub fn read_lock_as(&self, thread_index: usize) -> usize {
        let index = self.sublock_for(thread_index);
        self.sublocks[index].read_lock();
        index
    }

    pub fn try_read_lock_as(&self, thread_index: usize) -> Option<usize> {
        let index = self.sublock_for(thread_index);
        self.sublocks[index].try_read_lock().map(|()| index)
    }
}

impl Default for DistributedLock {
    fn default() -> Self {
        Self::new()
    }
}

unsafe impl RawRwLock for DistributedLock {
    type ReadToken = usize;

    #[inline]
    fn read_lock(&self) -> usize {
        self.read_lock_as(thread::current_index())
    }

    fn try_read_lock(&self) -> Option<usize> {
        self.try_read_lock_as(thread::current_index())
    }

    #[inline]
    unsafe fn read_unlock(&self, token: usize) {
        self.sublocks[token].read_unlock(());
    }

    fn write_lock(&self) {
        // Ascending order: two writers can never hold each other's next sublock.
        for sublock in self.sublocks.iter() {
            sublock.write_lock();
        }
    }

    fn try_write_lock(&self) -> bool {
        for (acquired, sublock) in self.sublocks.iter().enumerate() {
            if !sublock.try_write_lock() {
                for held in self.sublocks[..acquired].iter().rev() {
                    unsafe { held.write_unlock() };
                }
                return false;
            }
        }
        true
    }

    unsafe fn write_unlock(&self) {
        for sublock in self.sublocks.iter().rev() {
            sublock.write_unlock();
        }
    }
}
