use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// The amplitudes were requested at (or numerically on top of) a zero of Δ(k).
    #[error("k = {k} is a pole of the scattering amplitudes (|Δ|/|kq| = {ratio:.3e})")]
    Pole { k: Complex64, ratio: f64 },

    #[error("no accepted transmission peak in [{e_min}, {e_max}]")]
    NoPeaks { e_min: f64, e_max: f64 },

    #[error("pole search did not converge after {iterations} iterations (last k = {last})")]
    NoConvergence { iterations: usize, last: Complex64 },

    #[error("iterate k = {k} left the fourth quadrant")]
    WrongQuadrant { k: Complex64 },

    #[error("k = {k} is not a resonance pole (|Δ|/|kq| = {ratio:.3e})")]
    NotAPole { k: Complex64, ratio: f64 },

    #[error("k = {k} lies outside the half plane required by the {variant} variant")]
    Quadrant { k: Complex64, variant: &'static str },

    #[error("transformation function has a node near x = {x}")]
    Node { x: f64 },

    #[error("flux velocity vanishes near x = {x}")]
    ZeroVelocity { x: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
