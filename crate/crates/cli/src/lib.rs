//! Command-line driver for the adaptive primal-dual toolkit: JSON-configured
//! experiments, parameter sweeps, numerical self-checks and operator norms.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod opspec;
pub mod runner;
pub mod selfcheck;

pub use error::{CliError, Result};
