use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge: {0}")]
    NonConvergent(String),

    #[error("quadrature failed: estimate {estimate:e}, error {error:e} above tolerance {tol:e}")]
    QuadratureFailure { estimate: f64, error: f64, tol: f64 },

    #[error("Laplace inversion failed: {0}")]
    InversionFailure(String),

    #[error("root finding failed: {0}")]
    RootFindFailure(String),
}

impl Error {
    /// True for parameter/precondition problems, false for numerical breakdowns.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
