//! Command-line front end of the situational-awareness pipeline.

pub mod config;
pub mod error;
pub mod stages;

pub use config::{ConfigFile, PipelineConfig};
pub use error::{CliError, ErrorKind, Result};
