//! Configuration, dispatch and artifact writing for the `spme` binary.

pub mod config;
pub mod dispatch;
pub mod output;

pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use dispatch::{dispatch, RunOutcome};
