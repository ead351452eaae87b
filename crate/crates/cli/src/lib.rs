//! Experiment drivers for the `nilweyl` command-line tool.

pub mod commands;
pub mod config;
pub mod output;
