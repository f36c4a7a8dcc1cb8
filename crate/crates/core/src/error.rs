use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is outside its domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("point {re}+{im}i lies on the cut and needs a side (+i0 or -i0)")]
    Ambiguous { re: f64, im: f64 },

    #[error("lambda = {lambda} is within {margin} of a threshold (0 or pi)")]
    Edge { lambda: f64, margin: f64 },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("condition number {cond:e} exceeds cap {cap:e}")]
    IllConditioned { cond: f64, cap: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("kernel is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),

    #[error("kernel is not nonnegative: eigenvalue {0:e}")]
    Indefinite(f64),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("route refused: {0}")]
    RouteRefused(String),

    #[error("asymptotic fit failed: relative residual {residual:e} above {tol:e}")]
    FitFailed { residual: f64, tol: f64 },

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { what, detail: detail.into() }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Ambiguous { .. }
                | Error::Shape(_)
                | Error::Precondition(_)
                | Error::NotSymmetric(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
