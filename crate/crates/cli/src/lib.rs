//! Library backing the `asforge` binary: job configs, the command
//! implementations, the subspace search, report rendering and the
//! brute-force recount oracle.  The binary in `main.rs` is a thin clap
//! wrapper around [`commands`].

pub mod commands;
pub mod config;
pub mod oracle;
pub mod report;
pub mod search;
