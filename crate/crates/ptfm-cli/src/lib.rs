//! Library surface of the `ptfm` binary: config parsing and the subcommand
//! implementations, exposed so integration tests can drive them in-process.

pub mod commands;
pub mod config;
