//! File formats and job execution behind the `stpconv` binary.

pub mod error;
pub mod io;
pub mod job;

pub use error::CliError;
pub use job::{reference_report, run, JobMode, JobSpec, OutputFormat};
