use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("{function}: argument out of domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("{function}: no convergence after {iterations} iterations ({detail})")]
    NonConvergence {
        function: &'static str,
        iterations: usize,
        detail: String,
    },

    #[error("quadrature budget of {subdivisions} subdivisions exhausted: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureBudget {
        subdivisions: usize,
        estimate: f64,
        error_bound: f64,
    },

    #[error("{function}: non-finite value ({detail})")]
    NotFinite { function: &'static str, detail: String },
}

impl NumericError {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        NumericError::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn not_finite(function: &'static str, detail: impl Into<String>) -> Self {
        NumericError::NotFinite {
            function,
            detail: detail.into(),
        }
    }
}

/// Invalid scenario or experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    Missing(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    Type {
        key: String,
        value: String,
        expected: &'static str,
    },

    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },

    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl ConfigError {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Top-level error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] NumericError),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
