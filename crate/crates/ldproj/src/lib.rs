//! Command-line experiments on top of `ldproj-core`: strict JSON configs,
//! parallel drivers and reproducible CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod drivers;
pub mod error;
pub mod output;

pub use commands::Invocation;
pub use config::{Format, RunConfig};
pub use error::{CliError, ErrorKind};
