use std::fmt;
use std::path::Path;

use thiserror::Error;

/// One violated invariant of a job config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config at {field}: {message}")]
    Config { field: String, message: String },

    #[error("{}", join(.0))]
    Validation(Vec<Diagnostic>),

    #[error("sweep[{index}]: {source}")]
    Numerical {
        index: usize,
        #[source]
        source: carleman_core::Error,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Validation(_) => 2,
            CliError::Numerical { source, .. } if source.is_input_error() => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Validation(_) => "validation",
            CliError::Numerical { source, .. } => match source {
                carleman_core::Error::Domain { .. } => "domain",
                carleman_core::Error::Ambiguous { .. } => "ambiguous",
                carleman_core::Error::Edge { .. } => "edge",
                carleman_core::Error::GridTooSmall(_) => "grid_too_small",
                carleman_core::Error::IllConditioned { .. } => "ill_conditioned",
                carleman_core::Error::Singular(_) => "singular",
                carleman_core::Error::NotSymmetric(_) => "not_symmetric",
                carleman_core::Error::Indefinite(_) => "indefinite",
                carleman_core::Error::Divergent(_) => "divergent",
                carleman_core::Error::Precondition(_) => "precondition",
                carleman_core::Error::RouteRefused(_) => "route_refused",
                carleman_core::Error::FitFailed { .. } => "fit_failed",
                carleman_core::Error::NotConverged(_) => "not_converged",
                carleman_core::Error::Shape(_) => "shape",
            },
            CliError::Io { .. } => "io",
        }
    }

    /// `error code=<code> exit=<n> message=<text>` on a single line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error code={} exit={} message={}", self.code(), self.exit_code(), msg)
    }
}
