// SPDX-License-Identifier: Apache-2.0

use std::hint;
use std::thread;

/// Largest spin burst before waiting turns into `yield_now`.
const SPIN_LIMIT: u32 = 1024;

/// Exponential spin-then-yield waiting.
#[derive(Debug)]
pub(crate) struct Backoff {
    spins: u32,
}

impl Backoff {
    pub(crate) fn new() -> Self {
        Backoff { spins: 1 }
    }

    pub(crate) fn snooze(&mut self) {
        if self.spins <= SPIN_LIMIT {
            for _ in 0..self.spins {
                hint::spin_loop();
            }
            self.spins <<= 1;
        } else {
            thread::yield_now();
        }
    }

    #[cfg(test)]
    fn is_yielding(&self) -> bool {
        self.spins > SPIN_LIMIT
    }
}
