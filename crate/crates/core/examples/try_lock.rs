// SPDX-License-Identifier: Apache-2.0

//! Non-blocking acquisition. A writer's `try_write` never waits for readers
//! on the fast path: if one is inside, bias is left on and the attempt
//! fails.

use bravo::{BravoLock, Policy, RawRwLock, RwLock};

fn main() {
    let lock: RwLock<String> = RwLock::with_raw(
        BravoLock::new().with_policy(Policy::new(0)),
        "hello".to_string(),
    );

    // First read goes through the underlying lock and turns bias on.
    drop(lock.read());
    assert!(lock.raw().is_biased());

    let reader = lock.read();
    println!(
        "reader fast: {}",
        lock.raw().table().positions_of(lock.raw().id()).len() == 1
    );
    println!(
        "try_write with a reader inside: {}",
        lock.try_write().is_some()
    );
    println!("bias still on: {}", lock.raw().is_biased());

    println!("try_read beside a reader: {}", lock.try_read().is_some());
    drop(reader);

    match lock.try_write() {
        Some(mut w) => {
            w.push_str(", world");
            println!("try_write on a free lock: true");
        }
        None => println!("try_write on a free lock: false"),
    }
    println!("bias after write: {}", lock.raw().is_biased());

    let w = lock.write();
    println!("try_read under a writer: {}", lock.try_read().is_some());
    println!(
        "raw try_read_lock under a writer: {}",
        lock.raw().try_read_lock().is_some()
    );
    drop(w);
    println!("{}", *lock.read());
}
