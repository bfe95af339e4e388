use thiserror::Error;

/// Errors raised by the estimation, learning and bound routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    /// Every history weight vanished, so the ratio estimator is undefined.
    #[error("no effective samples: total kernel weight is zero")]
    NoEffectiveSamples,

    #[error("degenerate design: normal equations are singular")]
    DegenerateDesign,

    #[error("observation at step {step} is inconsistent with every latent state")]
    InconsistentObservation { step: usize },

    #[error("chain is not mixing (reducible or periodic), second eigenvalue modulus {slem}")]
    NotMixing { slem: f64 },

    /// `t1 <= 0`; `margin` is `t * D0 - K2 * D2 * d^2 * b^2`.
    #[error("vacuous regime: t*D0 - K2*D2*d^2*b^2 = {margin} is not positive")]
    VacuousRegime { margin: f64 },

    #[error("sequence too short: need at least {needed} samples, have {have}")]
    SequenceTooShort { needed: usize, have: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors that stem from numerics rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::NoEffectiveSamples
                | Error::DegenerateDesign
                | Error::InconsistentObservation { .. }
                | Error::NotMixing { .. }
                | Error::VacuousRegime { .. }
        )
    }
}
