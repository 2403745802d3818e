// SPDX-License-Identifier: Apache-2.0

//! A read-mostly configuration map shared by several threads.
//!
//! Run with `cargo run --example basic`.

use std::collections::HashMap;
use std::sync::Arc;
use std::thread;

use bravo::{BravoLock, RwLock, Stats};

fn main() {
    let stats = Arc::new(Stats::new());
    let raw: BravoLock = BravoLock::new().with_stats(stats.clone());
    let config = Arc::new(RwLock::with_raw(raw, HashMap::from([("retries", 3u32)])));

    let readers: Vec<_> = (0..4)
        .map(|i| {
            let config = config.clone();
            thread::spawn(move || {
                let mut sum = 0u64;
                for _ in 0..100_000 {
                    sum += *config.read().get("retries").unwrap() as u64;
                }
                println!("reader {i}: sum {sum}");
            })
        })
        .collect();

    config.write().insert("retries", 5);
    for r in readers {
        r.join().unwrap();
    }

    let s = stats.snapshot();
    println!(
        "reads {} ({} fast, {} slow), writes {}, revocations {}",
        s.reads(),
        s.fast_reads,
        s.slow_reads,
        s.write_acquires,
        s.revocations
    );
    println!("bias on at exit: {}", config.raw().is_biased());
}
