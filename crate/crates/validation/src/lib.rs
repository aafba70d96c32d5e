//! Acceptance suite for `specfact`; see `tests/acceptance.rs`.
