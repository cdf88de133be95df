//! Command-line harness for the `crlimit` experiments.
//!
//! Each subcommand validates its configuration, runs one experiment, checks
//! the invariants that experiment is meant to exhibit and writes a JSON
//! report (configuration, checks, scalar results) and a CSV table to the
//! output directory. Exit codes: 0 when every check passes, 1 when a check
//! fails, 2 on a configuration error.

pub mod cli;
pub mod commands;
pub mod oracle;
pub mod report;

pub use commands::run;
pub use report::{Check, Outcome, Table};
