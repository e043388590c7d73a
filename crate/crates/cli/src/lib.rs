//! Stage commands and file formats for the `lft` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod svg;
pub mod tree_io;

pub use commands::{Layout, RunManifest, RunOptions};
pub use config::PipelineConfig;
pub use error::{CliError, CliResult};
