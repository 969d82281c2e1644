use thiserror::Error;

/// Errors raised by the numerical kernels, the models and the front-end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} lies on a pole")]
    Pole { function: &'static str, value: f64 },

    #[error("{function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    #[error("{function}: series did not converge within {terms} terms")]
    NonConvergence { function: &'static str, terms: usize },

    #[error("{function}: integral diverges ({message})")]
    Divergence {
        function: &'static str,
        message: String,
    },

    #[error("quadrature did not reach tolerance: estimated error {estimate:e} after {intervals} subintervals")]
    Quadrature { estimate: f64, intervals: usize },

    #[error("closed-form capacity: alpha = {alpha} is within {guard} of a pole, use the quadrature route")]
    PoleProximity { alpha: f64, guard: f64 },

    #[error("closed-form capacity: estimated relative rounding error {estimate:e} exceeds {limit:e}, use the quadrature route")]
    IllConditioned { estimate: f64, limit: f64 },

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("{0}")]
    Config(String),

    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            function,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }
}
