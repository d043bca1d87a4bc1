use thiserror::Error;

/// Errors raised by model construction, propagation and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// More vibrational states were requested than the grid can represent.
    #[error("grid cannot resolve {requested} vibrational states: {reason}")]
    Resolution { requested: usize, reason: String },

    /// Sum-over-states basis misses too much Franck-Condon weight.
    #[error("basis truncation defect {defect:.3e} exceeds {limit:.1e}")]
    Truncation { defect: f64, limit: f64 },

    #[error("numerical instability at t = {time:.4}: {reason}")]
    Instability { time: f64, reason: String },

    #[error("waiting time {time} outside simulated window [{min}, {max}]")]
    Range { time: f64, min: f64, max: f64 },

    #[error("frequency band [{low}, {high}] outside [0, {nyquist}]")]
    FrequencyRange { low: f64, high: f64, nyquist: f64 },

    #[error("analysis window too short: {0}")]
    Window(String),

    #[error("spectrum carries no weight")]
    EmptySpectrum,

    #[error("need at least {needed} samples, got {got}")]
    Sampling { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
