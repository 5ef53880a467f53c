use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for `{0}`")]
    NonFinite(&'static str),

    #[error("negative occupation `{name}` = {value}")]
    NegativeOccupation { name: &'static str, value: f64 },

    #[error("transmissivity {0} outside [0, 1]")]
    TransmissivityOutOfRange(f64),

    #[error("mode index {0} is not 1 or 2")]
    BadModeIndex(usize),

    #[error("negative radicand {0:e} in symplectic eigenvalue (unphysical input)")]
    NegativeRadicand(f64),

    #[error("entanglement indicator {0} is negative")]
    NegativeIndicator(f64),

    #[error("global invariant routes disagree: {direct} vs {invariant_form}")]
    FormulaMismatch { direct: f64, invariant_form: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ODE integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("ordering parameter {0} outside [-1, 1]")]
    OrderingOutOfRange(f64),

    #[error("s-ordered covariance is not positive semidefinite (min eigenvalue {0:e})")]
    NonPositiveCovariance(f64),

    #[error("ordering pair requires s2 < s1, got s1 = {s1}, s2 = {s2}")]
    BadOrderingPair { s1: f64, s2: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Fock cutoff {cutoff} too small: truncated population {tail:e} exceeds {tail_tol:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64, tail_tol: f64 },
}
