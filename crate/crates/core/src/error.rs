use thiserror::Error;

/// Failure modes shared by every model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Post-selection overlap |<g|i>|^2 is below the floor; the weak value diverges.
    #[error("post-selected state is orthogonal to the preparation (|<g|i>|^2 = {overlap_sq:e})")]
    OrthogonalPostSelection { overlap_sq: f64 },

    #[error("outcome has zero probability ({probability:e})")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("sub-shift diverges at theta = {theta} (zero-probability outcome)")]
    PoleAtTheta { theta: f64 },

    #[error("clock grid under-resolved: {0}")]
    GridUnderresolved(String),

    #[error("oscillator window too small: {window_sigmas} sigmas (need at least {minimum})")]
    WindowTooSmall { window_sigmas: f64, minimum: f64 },

    #[error("mean photon number must be positive (got {0})")]
    NonPositiveN0(f64),

    #[error("invalid range: {0}")]
    InvalidRange(String),
}

impl Error {
    /// True for the two divergence errors (vanishing outcome probability).
    pub fn is_zero_probability(&self) -> bool {
        matches!(
            self,
            Error::OrthogonalPostSelection { .. } | Error::ZeroProbabilityOutcome { .. } | Error::PoleAtTheta { .. }
        )
    }

    /// True for numerical-resolution failures (grid or window too coarse).
    pub fn is_resolution(&self) -> bool {
        matches!(self, Error::GridUnderresolved(_) | Error::WindowTooSmall { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
