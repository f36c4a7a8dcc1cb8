//! Batch front end for the `carleman-core` routines: JSON job configs in,
//! versioned CSV or JSON tables out.

pub mod config;
pub mod error;
pub mod kernels;
pub mod output;
pub mod run;
pub mod validate;

pub use config::{Command, JobConfig};
pub use error::{CliError, Diagnostic};
pub use output::{Format, Table, Value};
pub use run::run;
pub use validate::validate;
