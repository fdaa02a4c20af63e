//! Suite runners behind the `verify` binary.
//!
//! Each suite draws deterministic samples from a seed, runs a batch of
//! named checks against the [`polycone`] library, and produces a
//! machine-readable report plus optional CSV dumps.  The binary in
//! `main.rs` is a thin argument-parsing layer over [`suites::run_config`].

pub mod config;
pub mod csvout;
pub mod report;
pub mod suites;
