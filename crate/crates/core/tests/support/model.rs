// SPDX-License-Identifier: Apache-2.0

//! Exhaustive model of one fast-path reader racing one revoking writer.
//!
//! The model restates the protocol over loom primitives: a bias flag, the
//! reader's table slot, and an underlying lock reduced to a mutex. The
//! protected data is a loom cell, so any schedule in which the reader and
//! the writer touch it concurrently fails the model.
//!
//! loom treats sequentially consistent accesses as acquire/release, which
//! is too weak to express the store-then-load pairing on each side. The
//! model therefore places a sequentially consistent fence after the
//! reader's install and after the writer's bias clear; on real hardware the
//! sequentially consistent install and store used by the library give the
//! same guarantee.

use std::panic::{self, AssertUnwindSafe};

use loom::cell::UnsafeCell;
use loom::sync::atomic::{fence, AtomicBool, AtomicU64, Ordering};
use loom::sync::{Arc, Mutex};
use loom::thread;

const ID: u64 = 7;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    /// Orderings used by the library.
    Protocol,
    /// Every access relaxed and no fences: the model must find a violation.
    Relaxed,
}

struct Shared {
    rbias: AtomicBool,
    slot: AtomicU64,
    underlying: Mutex<()>,
    data: UnsafeCell<u64>,
}

fn reader(s: &Shared, strength: Strength) -> u64 {
    let (install, recheck) = match strength {
        Strength::Protocol => (Ordering::SeqCst, Ordering::SeqCst),
        Strength::Relaxed => (Ordering::Relaxed, Ordering::Relaxed),
    };
    if s.rbias.load(Ordering::Relaxed)
        && s.slot
            .compare_exchange(0, ID, install, Ordering::Relaxed)
            .is_ok()
    {
        if strength == Strength::Protocol {
            fence(Ordering::SeqCst);
        }
        if s.rbias.load(recheck) {
            let v = s.data.with(|p| unsafe { *p });
            s.slot.store(0, Ordering::Release);
            return v;
        }
        s.slot.store(0, Ordering::Release);
    }
    let _g = s.underlying.lock().unwrap();
    s.data.with(|p| unsafe { *p })
}

fn writer(s: &Shared, strength: Strength) {
    let (clear, scan) = match strength {
        Strength::Protocol => (Ordering::SeqCst, Ordering::SeqCst),
        Strength::Relaxed => (Ordering::Relaxed, Ordering::Relaxed),
    };
    let _g = s.underlying.lock().unwrap();
    if s.rbias.load(Ordering::Relaxed) {
        s.rbias.store(false, clear);
        if strength == Strength::Protocol {
            fence(Ordering::SeqCst);
        }
        while s.slot.load(scan) == ID {
            thread::yield_now();
        }
    }
    s.data.with_mut(|p| unsafe { *p += 1 });
}

fn model(strength: Strength) {
    let mut builder = loom::model::Builder::new();
    builder.preemption_bound = Some(3);
    builder.check(move || {
        let s = Arc::new(Shared {
            rbias: AtomicBool::new(true),
            slot: AtomicU64::new(0),
            underlying: Mutex::new(()),
            data: UnsafeCell::new(0),
        });
        let r = {
            let s = s.clone();
            thread::spawn(move || reader(&s, strength))
        };
        writer(&s, strength);
        let seen = r.join().unwrap();
        assert!(seen <= 1);
    });
}

/// Explores every schedule of the protocol; `Err` carries the panic message.
pub fn check(strength: Strength) -> Result<(), String> {
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| model(strength)));
    panic::set_hook(hook);
    outcome.map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "model panicked".into())
    })
}
