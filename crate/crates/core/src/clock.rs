// SPDX-License-Identifier: Apache-2.0

//! Monotonic nanosecond timestamps.
//!
//! On x86_64 processors with an invariant time-stamp counter the counter is
//! read directly and scaled by a factor calibrated once against
//! [`Instant`]; this is several times cheaper than `Instant::now()` under
//! virtualization and sits on every slow-path read. Elsewhere `Instant` is
//! used.

use std::sync::OnceLock;
use std::time::Instant;

/// Nanoseconds since the first call in this process.
#[inline]
pub fn now_ns() -> u64 {
    clock().now_ns()
}

/// Whether timestamps come from the time-stamp counter.
pub fn uses_tsc() -> bool {
    matches!(clock(), Clock::Tsc { .. })
}

enum Clock {
    Instant(Instant),
    #[allow(dead_code)]
    Tsc {
        origin: u64,
        /// Nanoseconds per tick, 32.32 fixed point.
        scale: u64,
    },
}

fn clock() -> &'static Clock {
    static CLOCK: OnceLock<Clock> = OnceLock::new();
    CLOCK.get_or_init(Clock::calibrate)
}

impl Clock {
    #[inline]
    fn now_ns(&self) -> u64 {
        match *self {
            Clock::Instant(epoch) => epoch.elapsed().as_nanos() as u64,
            Clock::Tsc { origin, scale } => {
                let ticks = tsc::read().saturating_sub(origin);
                ((ticks as u128 * scale as u128) >> 32) as u64
            }
        }
    }

    fn calibrate() -> Clock {
        if !tsc::invariant() {
            return Clock::Instant(Instant::now());
        }
        let (t0, c0) = (Instant::now(), tsc::read());
        while t0.elapsed().as_micros() < 2_000 {
            std::hint::spin_loop();
        }
        let (ns, ticks) = (t0.elapsed().as_nanos(), tsc::read().wrapping_sub(c0));
        if ticks == 0 || ns == 0 {
            return Clock::Instant(t0);
        }
        Clock::Tsc {
            origin: c0,
            scale: ((ns << 32) / ticks as u128) as u64,
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod tsc {
    use std::arch::x86_64::{__cpuid, _rdtsc};

    #[inline]
    pub fn read() -> u64 {
        unsafe { _rdtsc() }
    }

    /// CPUID 8000_0007h EDX bit 8: the counter runs at a constant rate in
    /// every power state.
    pub fn invariant() -> bool {
        {
            __cpuid(0x8000_0000).eax >= 0x8000_0007 && __cpuid(0x8000_0007).edx & (1 << 8) != 0
        }
    }
}

#[cfg(not(target_arch = "x86_64"))]
mod tsc {
    pub fn read() -> u64 {
        0
    }

    pub fn invariant() -> bool {
        false
    }
}
