use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter violates its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density matrix requires at least one spin")]
    EmptyEnsemble,

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// The toral map has complex or unit-modulus eigenvalues, so no
    /// positive Lyapunov exponent exists.
    #[error("toral automorphism is not hyperbolic (trace {trace}, determinant {det})")]
    NotHyperbolic { trace: f64, det: f64 },

    #[error("eigen-aligned initial distribution requires a toral automorphism bath")]
    EigenAlignedWithoutAutomorphism,

    #[error("unknown sweep parameter `{0}` (expected one of: omega_ratio, vartheta, d0, sigma, x)")]
    UnknownParameter(String),

    #[error("unknown preset `{name}` (valid presets: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("config syntax: {0}")]
    ConfigSyntax(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than by
    /// the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::ConfigSyntax(_)
                | Error::InvalidParameter { .. }
                | Error::UnknownParameter(_)
                | Error::UnknownPreset { .. }
                | Error::EigenAlignedWithoutAutomorphism
        )
    }
}
