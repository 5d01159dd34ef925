use thiserror::Error;

/// Errors raised by the ratchet models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatchetError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "|eps| = {eps:e} is at quantum resonance; the epsilon-classical map is singular there, \
         use the quantum model (or the resonant formula) instead"
    )]
    Resonance { eps: f64 },

    #[error(
        "momentum basis overflow: tail mass {tail_mass:e} still above tolerance at N = {basis}"
    )]
    BasisOverflow { basis: usize, tail_mass: f64 },
}

impl RatchetError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        RatchetError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, RatchetError>;
