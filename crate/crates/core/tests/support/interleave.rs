// SPDX-License-Identifier: Apache-2.0

//! Barrier-controlled interleavings of the reader fast path against
//! revocation, each repeated many times on persistent threads.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Barrier};
use std::thread;

use bravo::{BravoLock, Policy, Publish, RawRwLock, VisibleReadersTable};

/// Lock on a private table with an inhibit multiplier of zero, so bias comes
/// back on the first slow read after every revocation.
pub fn fresh_lock() -> Arc<BravoLock> {
    Arc::new(
        BravoLock::new()
            .with_table(Arc::new(VisibleReadersTable::new(4096).unwrap()))
            .with_policy(Policy::new(0)),
    )
}

fn make_biased(lock: &BravoLock) {
    while !lock.is_biased() {
        let t = lock.read_lock();
        unsafe { lock.read_unlock(t) };
    }
}

fn spin_until(mut cond: impl FnMut() -> bool) {
    let mut n = 0u32;
    while !cond() {
        n = n.wrapping_add(1);
        if n % 64 == 0 {
            thread::yield_now();
        } else {
            std::hint::spin_loop();
        }
    }
}

/// A reader installs its slot, a writer clears bias before the reader
/// rechecks; the recheck must fail and clear the slot, which lets the writer
/// through.
pub fn recheck_failure_clears_slot(iterations: usize) -> Result<(), String> {
    let lock = fresh_lock();
    let phase = Arc::new(Barrier::new(2));
    let writer_in = Arc::new(AtomicBool::new(false));
    let writer = {
        let (lock, phase, writer_in) = (lock.clone(), phase.clone(), writer_in.clone());
        thread::spawn(move || {
            for _ in 0..iterations {
                phase.wait(); // reader installed
                lock.write_lock();
                writer_in.store(true, Ordering::SeqCst);
                phase.wait(); // reader checked
                writer_in.store(false, Ordering::SeqCst);
                unsafe { lock.write_unlock() };
                phase.wait(); // iteration done
            }
        })
    };
    let me = bravo::thread::current_index();
    let mut failure = None;
    for i in 0..iterations {
        make_biased(&lock);
        let slot = match lock.publish(me) {
            Publish::Installed(slot) => slot,
            other => {
                failure.get_or_insert(format!("iteration {i}: publish gave {other:?}"));
                lock.slot_for(me)
            }
        };
        phase.wait();
        spin_until(|| !lock.is_biased());
        if writer_in.load(Ordering::SeqCst) {
            failure.get_or_insert(format!(
                "iteration {i}: writer entered past an installed slot"
            ));
        }
        if lock.confirm(slot) {
            failure.get_or_insert(format!(
                "iteration {i}: recheck passed after bias was cleared"
            ));
        }
        if lock.table().load(slot).is_some() {
            failure.get_or_insert(format!("iteration {i}: slot {slot} not cleared"));
        }
        spin_until(|| writer_in.load(Ordering::SeqCst));
        phase.wait();
        phase.wait();
    }
    writer.join().map_err(|_| "writer panicked".to_string())?;
    failure.map_or(Ok(()), Err)
}

/// A fast reader holds its slot while a writer revokes; the writer must not
/// enter until the reader releases.
pub fn writer_waits_on_matching_slot(iterations: usize) -> Result<(), String> {
    let lock = fresh_lock();
    let phase = Arc::new(Barrier::new(2));
    let writer_in = Arc::new(AtomicBool::new(false));
    let writer = {
        let (lock, phase, writer_in) = (lock.clone(), phase.clone(), writer_in.clone());
        thread::spawn(move || {
            for _ in 0..iterations {
                phase.wait(); // reader holds
                lock.write_lock();
                writer_in.store(true, Ordering::SeqCst);
                writer_in.store(false, Ordering::SeqCst);
                unsafe { lock.write_unlock() };
                phase.wait();
            }
        })
    };
    let mut failure = None;
    for i in 0..iterations {
        make_biased(&lock);
        let token = lock.read_lock();
        let Some(slot) = token.slot() else {
            failure.get_or_insert(format!("iteration {i}: expected a fast-path token"));
            unsafe { lock.read_unlock(token) };
            phase.wait();
            phase.wait();
            continue;
        };
        phase.wait();
        spin_until(|| !lock.is_biased());
        for _ in 0..200 {
            if writer_in.load(Ordering::SeqCst) {
                failure.get_or_insert(format!(
                    "iteration {i}: writer entered beside a fast reader"
                ));
            }
            std::hint::spin_loop();
        }
        if lock.table().load(slot) != Some(lock.id()) {
            failure.get_or_insert(format!("iteration {i}: slot lost while held"));
        }
        unsafe { lock.read_unlock(token) };
        phase.wait();
    }
    writer.join().map_err(|_| "writer panicked".to_string())?;
    failure.map_or(Ok(()), Err)
}

/// Once a writer holds the lock with bias cleared, no reader gets in on the
/// fast path: try-reads fail, publication reports bias off, and a blocking
/// reader is admitted only after the writer leaves, on the slow path.
pub fn no_fast_admission_after_clear(iterations: usize) -> Result<(), String> {
    let lock = fresh_lock();
    let phase = Arc::new(Barrier::new(2));
    let writer_in = Arc::new(AtomicBool::new(false));
    let reader_in = Arc::new(AtomicBool::new(false));
    let writer = {
        let (lock, phase, writer_in, reader_in) = (
            lock.clone(),
            phase.clone(),
            writer_in.clone(),
            reader_in.clone(),
        );
        thread::spawn(move || {
            let mut failure = None;
            for i in 0..iterations {
                phase.wait(); // lock biased
                lock.write_lock();
                writer_in.store(true, Ordering::SeqCst);
                phase.wait(); // writer holds
                phase.wait(); // reader probed
                for _ in 0..200 {
                    if reader_in.load(Ordering::SeqCst) {
                        failure
                            .get_or_insert(format!("iteration {i}: reader admitted under writer"));
                    }
                    std::hint::spin_loop();
                }
                writer_in.store(false, Ordering::SeqCst);
                unsafe { lock.write_unlock() };
                phase.wait();
            }
            failure
        })
    };
    let me = bravo::thread::current_index();
    let mut failure = None;
    for i in 0..iterations {
        make_biased(&lock);
        phase.wait();
        phase.wait();
        if lock.is_biased() {
            failure.get_or_insert(format!("iteration {i}: bias survived a writer"));
        }
        if let Some(t) = lock.try_read_lock() {
            failure.get_or_insert(format!(
                "iteration {i}: try_read granted {t:?} under writer"
            ));
            unsafe { lock.read_unlock(t) };
        }
        match lock.publish(me) {
            Publish::BiasOff => {}
            other => {
                failure.get_or_insert(format!(
                    "iteration {i}: publish gave {other:?} under writer"
                ));
                if let Publish::Installed(slot) = other {
                    lock.confirm(slot);
                }
            }
        }
        phase.wait();
        let token = lock.read_lock();
        reader_in.store(true, Ordering::SeqCst);
        if writer_in.load(Ordering::SeqCst) {
            failure.get_or_insert(format!("iteration {i}: reader entered with writer inside"));
        }
        if token.is_fast() {
            failure.get_or_insert(format!(
                "iteration {i}: first reader after revocation was fast"
            ));
        }
        reader_in.store(false, Ordering::SeqCst);
        unsafe { lock.read_unlock(token) };
        phase.wait();
    }
    let writer_failure = writer.join().map_err(|_| "writer panicked".to_string())?;
    failure.or(writer_failure).map_or(Ok(()), Err)
}

/// Reader and writer released at the same instant, racing install/recheck
/// against clear/scan. Whoever wins, they must never be inside together.
pub fn racing_reader_and_writer(iterations: usize) -> Result<(), String> {
    let lock = fresh_lock();
    let start = Arc::new(Barrier::new(2));
    let inside = Arc::new(AtomicUsize::new(0));
    let overlaps = Arc::new(AtomicUsize::new(0));
    let fast = Arc::new(AtomicUsize::new(0));
    let writer = {
        let (lock, start, inside, overlaps) = (
            lock.clone(),
            start.clone(),
            inside.clone(),
            overlaps.clone(),
        );
        thread::spawn(move || {
            for _ in 0..iterations {
                start.wait();
                lock.write_lock();
                if inside.fetch_add(2, Ordering::SeqCst) != 0 {
                    overlaps.fetch_add(1, Ordering::SeqCst);
                }
                std::hint::spin_loop();
                inside.fetch_sub(2, Ordering::SeqCst);
                unsafe { lock.write_unlock() };
                start.wait();
            }
        })
    };
    for _ in 0..iterations {
        make_biased(&lock);
        start.wait();
        let token = lock.read_lock();
        if token.is_fast() {
            fast.fetch_add(1, Ordering::Relaxed);
        }
        if inside.fetch_add(1, Ordering::SeqCst) >= 2 {
            overlaps.fetch_add(1, Ordering::SeqCst);
        }
        std::hint::spin_loop();
        inside.fetch_sub(1, Ordering::SeqCst);
        unsafe { lock.read_unlock(token) };
        start.wait();
    }
    writer.join().map_err(|_| "writer panicked".to_string())?;
    match overlaps.load(Ordering::SeqCst) {
        0 => Ok(()),
        n => Err(format!("{n} overlapping reader/writer critical sections")),
    }
}
