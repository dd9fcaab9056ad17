//! Command-line front end: file formats, argument definitions and the
//! command implementations behind the `nfst` binary.

pub mod commands;
pub mod dot;
pub mod error;
pub mod format;

pub use commands::{run, Cli, Command};
pub use error::CliError;
pub use format::{parse_machine, parse_samples, write_machine, write_samples, MachineFile};
