//! Configuration-driven runner for the inequality suites of [`bfslab`].

pub mod config;
pub mod error;
pub mod runner;
pub mod suites;

pub use config::{SuiteConfig, SuiteName};
pub use error::CliError;
pub use runner::{refine, run, write_outputs};
