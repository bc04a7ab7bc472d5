//! Command-line front end: Hamiltonian files, TOML configs, run outputs,
//! plots and parameter sweeps on top of the `geoadapt` engine.

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod hamfile;
pub mod output;
pub mod plot;

pub use error::CliError;
