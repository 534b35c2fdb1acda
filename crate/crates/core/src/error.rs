use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("invalid {what}: {why}")]
    Domain { what: &'static str, why: String },

    #[error("time {t} outside profile interval [{lo}, {hi}]")]
    OutsideInterval { t: f64, lo: f64, hi: f64 },

    #[error("numeric failure in {context}: {why}")]
    Numeric { context: &'static str, why: String },

    #[error("spectral gap {gap:e} between coupled levels {j} and {k} below floor {floor:e}")]
    Degeneracy { gap: f64, floor: f64, j: usize, k: usize },

    #[error("norm drift {drift:e} exceeds limit {limit:e}")]
    NormDrift { drift: f64, limit: f64 },

    #[error("evolution left the adiabatic regime: minimum fidelity {min_fidelity} below floor {floor}")]
    NonAdiabatic { min_fidelity: f64, floor: f64 },

    #[error("beta = 1 is a pole of the trace-matched energy constant")]
    BetaPole,
}

impl Error {
    pub fn domain(what: &'static str, why: impl Into<String>) -> Self {
        Error::Domain { what, why: why.into() }
    }

    pub fn numeric(context: &'static str, why: impl Into<String>) -> Self {
        Error::Numeric { context, why: why.into() }
    }

    /// Stable machine-readable code, used by report serialization.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "E_INDEX",
            Error::Domain { .. } => "E_DOMAIN",
            Error::OutsideInterval { .. } => "E_INTERVAL",
            Error::Numeric { .. } => "E_NUMERIC",
            Error::Degeneracy { .. } => "E_DEGENERACY",
            Error::NormDrift { .. } => "E_NORM_DRIFT",
            Error::NonAdiabatic { .. } => "E_NON_ADIABATIC",
            Error::BetaPole => "E_SINGULARITY",
        }
    }
}
