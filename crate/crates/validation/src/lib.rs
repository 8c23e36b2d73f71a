//! Acceptance checks for `wgm-qed`, run as `cargo test -p wgm-qed-validation`.
//!
//! Each numbered criterion prints one `PASS` or `FAIL` line followed by the
//! measured values it was judged on.
