// SPDX-License-Identifier: Apache-2.0

//! The two baseline locks on their own: a centralized lock keeps every
//! reader in one word; a distributed lock spreads readers over per-CPU
//! sublocks and makes writers take all of them.

use std::num::NonZeroUsize;

use bravo::{CentralizedLock, DistributedLock, RawRwLock};

fn main() {
    let central = CentralizedLock::new();
    central.read_lock();
    central.read_lock();
    println!("centralized with two readers: {:?}", central.state());
    println!("try_write: {}", central.try_write_lock());
    unsafe {
        central.read_unlock(());
        central.read_unlock(());
    }

    let dist = DistributedLock::with_sublocks(NonZeroUsize::new(4).unwrap());
    let tokens: Vec<usize> = (0..6).map(|t| dist.read_lock_as(t)).collect();
    for i in 0..dist.sublock_count() {
        println!("sublock {i}: {} readers", dist.sublock_state(i).readers);
    }
    for t in tokens {
        unsafe { dist.read_unlock(t) };
    }
    dist.write_lock();
    println!(
        "writer holds every sublock: {}",
        (0..dist.sublock_count()).all(|i| dist.sublock_state(i).writer_present)
    );
    unsafe { dist.write_unlock() };
}
