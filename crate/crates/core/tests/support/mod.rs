// SPDX-License-Identifier: Apache-2.0

//! Oracles shared by the integration tests and the acceptance suite.

#![allow(dead_code)]

pub mod hash;
pub mod interleave;
pub mod machine;
pub mod model;
pub mod policy;
