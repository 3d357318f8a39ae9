use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the admissible parameter range.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method did not converge; `partial` carries the best value reached.
    #[error("numerical error: {message}")]
    Numerical {
        message: String,
        partial: Option<f64>,
    },
    /// A point configuration or face is affinely degenerate within tolerance.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// Two quantities that must agree do not (e.g. a negative probability).
    #[error("consistency error: {0}")]
    Consistency(String),
    /// The requested size exceeds the combinatorial budget of an exhaustive routine.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A cache or configuration file could not be read or parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, partial: Option<f64>) -> Self {
        Error::Numerical {
            message: msg.into(),
            partial,
        }
    }
}
