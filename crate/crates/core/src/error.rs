use thiserror::Error;

/// Errors raised by the solvers and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow at radius {radius:e} (ln r = {ln_radius})")]
    StepUnderflow { radius: f64, ln_radius: f64 },

    #[error("step budget of {max_steps} exhausted at ln r = {ln_radius}")]
    StepBudget { max_steps: usize, ln_radius: f64 },

    #[error("non-finite state at ln r = {ln_radius}")]
    NonFinite { ln_radius: f64 },

    #[error("event not found: {0}")]
    EventNotFound(String),

    #[error("quadrature did not reach tolerance: estimate {value} with error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("Newton iteration diverged after {} iterates: {reason}", trace.len())]
    Divergence {
        reason: String,
        trace: Vec<(f64, f64)>,
    },

    #[error("extrapolation refused: {0}")]
    Extrapolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
