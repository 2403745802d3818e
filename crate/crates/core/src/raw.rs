// SPDX-License-Identifier: Apache-2.0

/// Raw reader-writer lock interface.
///
/// Read acquisition returns a token that must be handed back to
/// [`read_unlock`](RawRwLock::read_unlock). Locks that need no per-reader
/// state use `()`; [`DistributedLock`](crate::DistributedLock) returns the
/// sublock it used and [`BravoLock`](crate::BravoLock) the visible-readers
/// slot it published into.
///
/// # Safety
///
/// Implementations must guarantee mutual exclusion: while write permission
/// is held no other read or write permission is held. Acquisition must
/// synchronize-with the preceding release (acquire/release ordering), so
/// that data protected by the lock can be handed out by [`RwLock`](crate::RwLock).
pub unsafe trait RawRwLock: Send + Sync {
    type ReadToken: Send;

    fn read_lock(&self) -> Self::ReadToken;

    /// Attempts read acquisition without blocking.
    fn try_read_lock(&self) -> Option<Self::ReadToken>;

    /// # Safety
    ///
    /// `token` must come from a read acquisition of this lock that has not
    /// been released yet.
    unsafe fn read_unlock(&self, token: Self::ReadToken);

    fn write_lock(&self);

    /// Attempts write acquisition without blocking.
    fn try_write_lock(&self) -> bool;

    /// # Safety
    ///
    /// Write permission on this lock must be held (by any thread).
    unsafe fn write_unlock(&self);
}
