use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("Fock truncation n_max = {n_max} leaves tail mass {tail:e} > {tolerance:e}")]
    TruncationTooSmall {
        n_max: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state is not pure under the requested evolution (gamma0 > 0 with {components} components)")]
    NotPure { components: usize },

    #[error("relative entropy of coherence {value:e} is negative beyond tolerance")]
    NegativeBeyondTolerance { value: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("step too large: {0}")]
    StepTooLarge(String),

    #[error("population {population:e} in the top two Fock levels exceeds the truncation guard at t = {t}")]
    TruncationGuard { t: f64, population: f64 },

    #[error("probability density {density:e} below the floor at x = {x}, t = {t}")]
    DensityFloorHit { x: f64, t: f64, density: f64 },

    #[error("the analytic Fock-space solution is zero-temperature only (nbar = {nbar})")]
    ThermalUnsupported { nbar: f64 },

    #[error("detector window captures no probability (I_alpha = {i_alpha:e}, I_beta = {i_beta:e})")]
    EmptyWindow { i_alpha: f64, i_beta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
