use thiserror::Error;

use crate::geometry::Vec3;

/// Errors raised by model evaluation and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The wave function vanishes (to within the node threshold) where a quantity
    /// that divides by the amplitude was requested.
    #[error("wave function node at x = {x:?}, t = {t}")]
    Node { x: Vec3, t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t}, x = {x:?}")]
    StepFailure { t: f64, x: Vec3 },

    #[error("{0} is not normalizable; Born-rule sampling is undefined")]
    NonNormalizable(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
