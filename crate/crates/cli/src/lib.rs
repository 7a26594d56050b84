//! Command-line front end: chain and landmark file I/O, run manifests and the
//! `detect`, `simulate`, `evaluate` and `features` subcommands.

pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{run, Cli, Command};
pub use error::{CliError, Result};
