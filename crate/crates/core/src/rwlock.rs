// SPDX-License-Identifier: Apache-2.0

use std::cell::UnsafeCell;
use std::fmt;
use std::ops::{Deref, DerefMut};

use crate::bravo::BravoLock;
use crate::raw::RawRwLock;

/// Data protected by a raw reader-writer lock, with RAII guards.
pub struct RwLock<T: ?Sized, R: RawRwLock = BravoLock> {
    raw: R,
    data: UnsafeCell<T>,
}

unsafe impl<T: ?Sized + Send, R: RawRwLock> Send for RwLock<T, R> {}
unsafe impl<T: ?Sized + Send + Sync, R: RawRwLock> Sync for RwLock<T, R> {}

impl<T, R: RawRwLock + Default> RwLock<T, R> {
    pub fn new(value: T) -> Self {
        Self::with_raw(R::default(), value)
    }
}

impl<T, R: RawRwLock> RwLock<T, R> {
    pub fn with_raw(raw: R, value: T) -> Self {
        RwLock {
            raw,
            data: UnsafeCell::new(value),
        }
    }

    pub fn into_inner(self) -> T {
        self.data.into_inner()
    }
}

impl<T: ?Sized, R: RawRwLock> RwLock<T, R> {
    pub fn raw(&self) -> &R {
        &self.raw
    }

    pub fn read(&self) -> RwLockReadGuard<'_, T, R> {
        let token = self.raw.read_lock();
        RwLockReadGuard {
            lock: self,
            token: Some(token),
        }
    }

    pub fn try_read(&self) -> Option<RwLockReadGuard<'_, T, R>> {
        let token = self.raw.try_read_lock()?;
        Some(RwLockReadGuard {
            lock: self,
            token: Some(token),
        })
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, T, R> {
        self.raw.write_lock();
        RwLockWriteGuard { lock: self }
    }

    pub fn try_write(&self) -> Option<RwLockWriteGuard<'_, T, R>> {
        self.raw
            .try_write_lock()
            .then(|| RwLockWriteGuard { lock: self })
    }

    pub fn get_mut(&mut self) -> &mut T {
        self.data.get_mut()
    }
}

impl<T: Default, R: RawRwLock + Default> Default for RwLock<T, R> {
    fn default() -> Self {
        RwLock::new(T::default())
    }
}

impl<T: ?Sized + fmt::Debug, R: RawRwLock> fmt::Debug for RwLock<T, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.try_read() {
            Some(guard) => f.debug_struct("RwLock").field("data", &&*guard).finish(),
            None => f.debug_struct("RwLock").field("data", &"<locked>").finish(),
        }
    }
}

#[must_use = "if unused the RwLock will immediately unlock"]
pub struct RwLockReadGuard<'a, T: ?Sized, R: RawRwLock> {
    lock: &'a RwLock<T, R>,
    token: Option<R::ReadToken>,
}

impl<T: ?Sized, R: RawRwLock> Deref for RwLockReadGuard<'_, T, R> {
    type Target = T;

    fn deref(&self) -> &T {
        unsafe { &*self.lock.data.get() }
    }
}

impl<T: ?Sized, R: RawRwLock> Drop for RwLockReadGuard<'_, T, R> {
    fn drop(&mut self) {
        if let Some(token) = self.token.take() {
            // SAFETY: the token came from this lock and is released once.
            unsafe { self.lock.raw.read_unlock(token) };
        }
    }
}

#[must_use = "if unused the RwLock will immediately unlock"]
pub struct RwLockWriteGuard<'a, T: ?Sized, R: RawRwLock> {
    lock: &'a RwLock<T, R>,
}

impl<T: ?Sized, R: RawRwLock> Deref for RwLockWriteGuard<'_, T, R> {
    type Target = T;

    fn deref(&self) -> &T {
        unsafe { &*self.lock.data.get() }
    }
}

impl<T: ?Sized, R: RawRwLock> DerefMut for RwLockWriteGuard<'_, T, R> {
    fn deref_mut(&mut self) -> &mut T {
        unsafe { &mut *self.lock.data.get() }
    }
}

impl<T: ?Sized, R: RawRwLock> Drop for RwLockWriteGuard<'_, T, R> {
    fn drop(&mut self) {
        // SAFETY: the guard exists only while write permission is held.
        unsafe { self.lock.raw.write_unlock() };
    }
}
