// SPDX-License-Identifier: Apache-2.0

//! Biased reader-writer locks.
//!
//! [`BravoLock`] wraps any lock implementing [`RawRwLock`] and gives it a
//! reader fast path: instead of touching the lock word, a reader hashes its
//! thread index with the lock's identity and publishes the lock into a slot
//! of a process-wide [`VisibleReadersTable`]. Readers of the same lock land
//! on different slots, so read-mostly workloads stop bouncing a single cache
//! line between cores. Writers always go through the underlying lock and,
//! when reader bias is enabled, revoke it by scanning the table for
//! conflicting readers. The time spent revoking is multiplied by a
//! configurable factor and used as a window during which bias stays off,
//! which bounds the slowdown writers can suffer.
//!
//! Two baseline underlying locks are provided: [`CentralizedLock`], a single
//! word holding the reader count and writer bits, and [`DistributedLock`], an
//! array of centralized sublocks padded to separate cache sectors.
//!
//! ```
//! use bravo::{BravoLock, CentralizedLock, RwLock};
//!
//! let lock: RwLock<Vec<u32>, BravoLock<CentralizedLock>> = RwLock::new(vec![1, 2, 3]);
//! assert_eq!(lock.read().len(), 3);
//! lock.write().push(4);
//! assert_eq!(*lock.read(), [1, 2, 3, 4]);
//! ```
//!
//! The [`bench`] module reproduces the usual reader-writer lock
//! microbenchmarks (alternator, test_rwlock, RWBench and an inter-lock
//! interference sweep); the `bravo-bench` binary is a thin CLI over it.

mod backoff;
pub mod bench;
mod bravo;
mod centralized;
pub mod clock;
mod distributed;
mod raw;
mod rwlock;
mod sector;
pub mod stats;
mod table;
pub mod thread;

pub use crate::bravo::{BravoLock, Policy, Publish, ReaderToken};
pub use crate::centralized::{CentralizedLock, CentralizedState};
pub use crate::distributed::DistributedLock;
pub use crate::raw::RawRwLock;
pub use crate::rwlock::{RwLock, RwLockReadGuard, RwLockWriteGuard};
pub use crate::sector::{Sector, SECTOR_SIZE};
pub use crate::stats::{LockStats, RevocationRecord, Stats};
pub use crate::table::{hash_slot, LockId, TableError, VisibleReadersTable, DEFAULT_TABLE_SIZE};
