// SPDX-License-Identifier: Apache-2.0

use std::ops::{Deref, DerefMut};

/// Size of the coherence sector that independently written state is padded to.
///
/// 64-byte lines are fetched in adjacent pairs on current x86 parts, so 128
/// bytes is the unit that actually avoids false sharing.
pub const SECTOR_SIZE: usize = 128;

/// Pads and aligns a value to its own [`SECTOR_SIZE`] sector.
#[derive(Debug, Default)]
#[repr(align(128))]
pub struct Sector<T>(pub T);

impl<T> Sector<T> {
    pub const fn new(value: T) -> Self {
        Sector(value)
    }

    pub fn into_inner(self) -> T {
        self.0
    }
}

impl<T> Deref for Sector<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.0
    }
}

impl<T> DerefMut for Sector<T> {
    fn deref_mut(&mut self) -> &mut T {
        &mut self.0
    }
}
