use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared across the crate.
///
/// The bound-state variants double as per-row status values in spectrum
/// tables, so they carry enough context to be printed on their own.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension N = {0} is not supported (N >= 2 required)")]
    InvalidDimension(u32),

    #[error("fall to center: indicial discriminant {discriminant} < 0")]
    FallToCenter { discriminant: f64 },

    #[error("not normalizable: 2k + 3 - N = {value} <= 0")]
    NotNormalizable { value: f64 },

    #[error("no bound states: coefficient of 1/r is {coulomb} (must be negative)")]
    NoBoundStates { coulomb: f64 },

    #[error("grid too coarse: h^2 eps^2 = {0} exceeds 0.1")]
    Resolution(f64),

    #[error("non-finite matrix entry at index {0}")]
    NonFinite(usize),

    #[error("ladder algebra violated: {0}")]
    AlgebraViolation(String),
}

impl Error {
    /// Short machine-readable tag used in tables and reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::FallToCenter { .. } => "FallToCenter",
            Error::NotNormalizable { .. } => "NotNormalizable",
            Error::NoBoundStates { .. } => "NoBoundStates",
            Error::Resolution(_) => "ResolutionError",
            Error::NonFinite(_) => "NonFinite",
            Error::AlgebraViolation(_) => "AlgebraViolation",
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
