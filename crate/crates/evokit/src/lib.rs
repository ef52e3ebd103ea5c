//! File formats, reports and subcommands behind the `evokit` binary.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{run, Cli, Command, Format, Outcome};
