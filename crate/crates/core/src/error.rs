use thiserror::Error;

/// Errors raised by the library. Each variant names the operation whose
/// contract was violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: invalid input: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    #[error("{op}: superluminal velocity |beta| = {beta} (must be < 1)")]
    Superluminal { op: &'static str, beta: f64 },

    #[error("{op}: map does not preserve the metric (max deviation {deviation:e})")]
    InvalidMap { op: &'static str, deviation: f64 },

    #[error("{op}: shape mismatch: {msg}")]
    Shape { op: &'static str, msg: String },

    #[error("{op}: rank error: {msg}")]
    Rank { op: &'static str, msg: String },

    #[error("{op}: contraction of slots with equal variance ({slot_a}, {slot_b})")]
    Variance {
        op: &'static str,
        slot_a: usize,
        slot_b: usize,
    },

    #[error("{op}: field is not antisymmetric (max |G + G^T| = {deviation:e})")]
    NotAntisymmetric { op: &'static str, deviation: f64 },

    #[error("{op}: singular potential, s^2 + regularizer = {value} <= 0")]
    SingularPotential { op: &'static str, value: f64 },

    #[error("{op}: segment {segment} is not timelike (interval {interval})")]
    NonTimelikePath {
        op: &'static str,
        segment: usize,
        interval: f64,
    },

    #[error("{op}: degenerate input: {msg}")]
    Degenerate { op: &'static str, msg: String },

    #[error("minimize_action: no convergence after {iterations} iterations (gradient max-norm {grad_norm:e}, best action {best_action})")]
    Convergence {
        iterations: usize,
        grad_norm: f64,
        best_action: f64,
        best_path: Box<crate::dynamics::Path4>,
    },

    #[error("{op}: momentum grid undersamples the phase ({phase_step} rad per cell > pi)")]
    Undersampled { op: &'static str, phase_step: f64 },

    #[error("{0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidInput {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn shape(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Shape {
            op,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
