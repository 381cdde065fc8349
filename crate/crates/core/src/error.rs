use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// The input carries no mass to normalize (all-zero frame, zero power).
    #[error("degenerate distribution: {0}")]
    Degenerate(&'static str),

    #[error("distribution sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("q is zero at index {index} where p = {p}")]
    SupportViolation { index: usize, p: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("signal buffer is empty")]
    EmptySignal,

    #[error("window of {window} samples exceeds signal length {len}")]
    WindowTooLong { window: usize, len: usize },

    #[error("gaussian disequilibrium is singular: 2*sigma_q^2 - sigma_p^2 = {0}")]
    Singular(f64),

    #[error("perturbation leaves the probability simplex at eps = {0}")]
    LeavesSimplex(f64),

    #[error("calibration region has {found} frames, at least {needed} required")]
    CalibrationTooShort { found: usize, needed: usize },
}
