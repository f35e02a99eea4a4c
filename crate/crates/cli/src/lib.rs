//! Library half of the `squidsim` binary: configuration parsing, table
//! serialization, and the per-subcommand runners. Split out so the
//! integration and acceptance tests can drive the same code paths the
//! binary uses.

pub mod config;
pub mod output;
pub mod run;
