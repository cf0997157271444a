//! Command-line front end: configuration, commands and report rendering.

pub mod commands;
pub mod config;
