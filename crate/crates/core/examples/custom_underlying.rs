// SPDX-License-Identifier: Apache-2.0

//! Putting the biased fast path in front of a lock that is not part of this
//! crate: a plain test-and-set spin lock used as a (degenerate) reader-writer
//! lock where readers also take it exclusively.
//!
//! With bias on, readers never touch the spin lock, so they run in
//! parallel anyway.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use bravo::{BravoLock, RawRwLock, RwLock, Stats};

#[derive(Default)]
struct SpinLock {
    held: AtomicBool,
}

impl SpinLock {
    fn acquire(&self) {
        while self
            .held
            .compare_exchange_weak(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_err()
        {
            std::hint::spin_loop();
        }
    }
}

unsafe impl RawRwLock for SpinLock {
    type ReadToken = ();

    fn read_lock(&self) {
        self.acquire();
    }

    fn try_read_lock(&self) -> Option<()> {
        self.try_write_lock().then_some(())
    }

    unsafe fn read_unlock(&self, _: ()) {
        self.held.store(false, Ordering::Release);
    }

    fn write_lock(&self) {
        self.acquire();
    }

    fn try_write_lock(&self) -> bool {
        self.held
            .compare_exchange(false, true, Ordering::Acquire, Ordering::Relaxed)
            .is_ok()
    }

    unsafe fn write_unlock(&self) {
        self.held.store(false, Ordering::Release);
    }
}

fn main() {
    let stats = Arc::new(Stats::new());
    let raw = BravoLock::with_underlying(SpinLock::default()).with_stats(stats.clone());
    let lock = Arc::new(RwLock::with_raw(raw, 0u64));

    thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| {
                for i in 0..50_000u64 {
                    if i % 10_000 == 0 {
                        *lock.write() += 1;
                    } else {
                        std::hint::black_box(*lock.read());
                    }
                }
            });
        }
    });

    let s = stats.snapshot();
    println!("value {}", *lock.read());
    println!(
        "fast reads {:.1}%, revocations {}",
        100.0 * s.fast_fraction(),
        s.revocations
    );
}
