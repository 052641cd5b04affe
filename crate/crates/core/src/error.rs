use std::path::PathBuf;

use thiserror::Error;

use crate::io::config::ConfigError;
use crate::quadrature::QuadratureError;

/// Crate-wide error.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is outside its valid domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error(transparent)]
    Config(#[from] ConfigError),

    /// A quadrature spot check disagreed with the closed form.
    #[error("spot check at {abscissa} failed: closed form {closed_form}, quadrature {quadrature}")]
    SpotCheck {
        abscissa: f64,
        closed_form: f64,
        quadrature: f64,
    },

    #[error("refusing to serialize non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed curve file: {0}")]
    CurveFormat(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the failure is numerical (non-convergence or a failed
    /// cross-check) rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature(_) | Error::SpotCheck { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
