//! Command-line harness for the kicked-rotor ratchet: TOML configs, single
//! runs, parameter sweeps and figure data bundles, all written as
//! deterministic CSV.

pub mod config;
pub mod error;
pub mod figure;
pub mod run;
pub mod table;

pub use error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
