use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quaternion has zero modulus, polar angles are undefined")]
    ZeroModulus,

    #[error("expected a unit pure quaternion, got scalar {scalar} and modulus {modulus}")]
    NotUnitPure { scalar: f64, modulus: f64 },

    #[error("degree of polarization {0} exceeds 1, not a valid spectral density")]
    InvalidDensity(f64),

    #[error("polarization orientation is undefined for an unpolarized density")]
    Unpolarized,

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
