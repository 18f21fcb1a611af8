//! Configuration parsing, deterministic output, command runners and the verify suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;
