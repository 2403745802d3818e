// SPDX-License-Identifier: Apache-2.0

//! Small per-thread indices.
//!
//! A thread gets an index the first time it asks for one and gives it back
//! when it exits; the smallest free index is handed out first. Live threads
//! therefore hold distinct, densely packed indices, which keeps slot hashing
//! and sublock selection spread out and lets per-thread shards be owned
//! exclusively.

use std::cell::Cell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const UNSET: usize = usize::MAX;

struct Registry {
    next: usize,
    free: BinaryHeap<Reverse<usize>>,
}

static REGISTRY: Mutex<Registry> = Mutex::new(Registry {
    next: 0,
    free: BinaryHeap::new(),
});

/// Indices for threads still running code after their registration was torn
/// down. Counted down from far above any registered index and never reused.
static LATE: AtomicUsize = AtomicUsize::new(usize::MAX / 2);

struct Registration(usize);

impl Registration {
    fn acquire() -> Self {
        let mut r = REGISTRY.lock().unwrap_or_else(|e| e.into_inner());
        let index = match r.free.pop() {
            Some(Reverse(i)) => i,
            None => {
                r.next += 1;
                r.next - 1
            }
        };
        Registration(index)
    }
}

impl Drop for Registration {
    fn drop(&mut self) {
        INDEX.with(|c| c.set(LATE.fetch_sub(1, Ordering::Relaxed)));
        let mut r = REGISTRY.lock().unwrap_or_else(|e| e.into_inner());
        r.free.push(Reverse(self.0));
    }
}

thread_local! {
    static INDEX: Cell<usize> = const { Cell::new(UNSET) };
    static REGISTRATION: Registration = Registration::acquire();
}

/// Index of the calling thread. No two live threads share an index.
#[inline]
pub fn current_index() -> usize {
    let index = INDEX.with(Cell::get);
    if index != UNSET {
        return index;
    }
    register()
}

#[cold]
fn register() -> usize {
    let index = REGISTRATION
        .try_with(|r| r.0)
        .unwrap_or_else(|_| LATE.fetch_sub(1, Ordering::Relaxed));
    INDEX.with(|c| c.set(index));
    index
}
