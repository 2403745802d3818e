// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite for `bravo`, kept in its own package so it runs after
//! the library's own tests. The suite is the `acceptance` test target:
//!
//! ```text
//! cargo test -p bravo-acceptance
//! BRAVO_ACCEPTANCE_ONLY=2,7 cargo test --test acceptance
//! ```
