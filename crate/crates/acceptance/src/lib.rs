// SPDX-License-Identifier: Apache-2.0

//! The shipping gate. The substance lives in `tests/acceptance.rs`: one
//! integration test per release criterion, each printing a single
//! `ACCEPTANCE nn PASS` line (visible with `cargo test -p acceptance --
//! --nocapture`).
