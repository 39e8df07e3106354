use thiserror::Error;

/// Errors raised by the simulation and analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("probability {0} is outside (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("log-gamma is undefined at the pole z = {0}")]
    Pole(f64),

    #[error("the {law} law has no closed-form {what}")]
    Unsupported {
        law: &'static str,
        what: &'static str,
    },

    #[error("{theorem} limit does not apply to this model: {reason}")]
    InvalidPairing {
        theorem: &'static str,
        reason: &'static str,
    },

    #[error("rejection budget exceeded after {attempts} attempts")]
    BudgetExceeded { attempts: u64 },

    #[error("no conditioning events observed in {n_paths} paths")]
    NoConditioningEvents { n_paths: usize },

    #[error("position {x} is outside the open interval ({lo}, {hi})")]
    OutsideInterval { x: f64, lo: f64, hi: f64 },

    #[error("step size too large: left-exit fraction {fraction:.4} exceeds 1%")]
    StepSizeFailure { fraction: f64 },

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
