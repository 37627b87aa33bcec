use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    /// The outer equilibrium iteration ran out of budget.
    #[error("solver did not converge after {iterations} iterations (max residual {residual:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last_u: Vec<f64>,
    },

    /// A scalar root could not be bracketed on its admissible interval.
    #[error("root not bracketed: {0}")]
    Bracketing(String),

    /// Calibration targets cannot be met with admissible parameters.
    #[error("infeasible calibration: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
