//! Command-line front end: PNG and tensor-file I/O, run configuration and the
//! `extract`, `sample` and `metrics` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod png;
pub mod tensor;

pub use config::RunConfig;
pub use error::CliError;
pub use tensor::Tensor;
