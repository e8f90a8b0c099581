//! File formats, pipeline commands and the command-line interface around
//! `diabetes-core`.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use error::{AppError, AppResult};
