//! Experiment runner: TOML configs in, JSON reports and CSV traces out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
