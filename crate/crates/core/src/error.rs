use thiserror::Error;

/// Errors raised by the analytic and numerical layers.
///
/// Infeasible power allocations are not errors; they surface as
/// [`crate::scenario::Coeff::Infeasible`] and a coverage of exactly zero.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("limit exceeded: {what} (requested {requested}, cap {cap})")]
    Limit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("numerical failure in {what}: achieved error estimate {estimate:e}")]
    Numerical { what: &'static str, estimate: f64 },

    #[error("invalid configuration: field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
