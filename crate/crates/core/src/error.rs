use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum HqrError {
    #[error("point {z} lies outside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("critical point of h at {z}: h' vanishes, map is not sense-preserving")]
    CriticalPoint { z: Complex64 },

    #[error("not quasiregular: sampled |omega| reached {k_hat} >= 1")]
    NotQuasiregular { k_hat: f64 },

    #[error("not sense-preserving on r = {r}: min(|h'| - |g'|) = {margin} at theta = {theta}")]
    NotSensePreserving { r: f64, theta: f64, margin: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("profiles cannot be paired: {0}")]
    Pairing(String),

    #[error("fit not converged: {which} has stderr {stderr}")]
    Unconverged { which: String, stderr: f64 },

    #[error("at r = {r}: {source}")]
    AtRadius {
        r: f64,
        #[source]
        source: Box<HqrError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HqrError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HqrError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HqrError>;
