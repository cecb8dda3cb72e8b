use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re} + {im}i lies on the cut or outside the admissible domain")]
    Domain { re: f64, im: f64 },

    #[error("trajectory absorbed by the hull at time {time} (Im w = {im})")]
    HullAbsorbed { time: f64, im: f64 },

    #[error("step limit of {limit} exceeded before reaching time {target}")]
    StepLimit { limit: usize, target: f64 },

    #[error("contour normalization failed: |m_0 - 1| = {deviation} at radius {radius}")]
    ContourNormalization { deviation: f64, radius: f64 },

    #[error("contour quadrature unstable: moment {order} changed by {change} under refinement")]
    ContourUnstable { order: usize, change: f64 },

    #[error("flow moments violate the normalization law: {0}")]
    NormalizationViolated(String),

    #[error("resolution n = {n} is infeasible for driver bound {bound} (maximum {max})")]
    InfeasibleResolution { n: usize, bound: f64, max: f64 },

    #[error("driving function takes negative value {value} at time {time}")]
    NegativeDriver { time: f64, value: f64 },

    #[error("infeasible spidernet data: {0}")]
    InfeasibleSpec(String),

    #[error("truncation depth {depth} too shallow for moment order {order}")]
    TruncationTooShallow { depth: usize, order: usize },

    #[error("reference computation failed: {0}")]
    ReferenceFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
