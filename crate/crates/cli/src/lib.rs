//! Library behind the `densparam` binary.
//!
//! Every subcommand is reachable through [`run`], which writes to the given
//! sink (or to `--output`) and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | malformed input or invalid parameters |
//! | 3 | numerical failure |
//! | 4 | `analyze` input is not a state |
//! | 5 | a reproduction or validation check failed |

mod app;
pub mod error;
pub mod matrix_io;
pub mod params;
pub mod report;
pub mod reproduce;
pub mod sweep;
pub mod validate;

pub use app::{run, Cli, Command, OutputFormat};
