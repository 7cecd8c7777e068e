use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    #[error("negative time t = {t}")]
    NegativeTime { t: f64 },

    /// The density at the evaluation point is below [`crate::DENSITY_FLOOR`].
    #[error("density underflow (ln rho = {ln_density}) at x = {x}, y = {y}, t = {t}")]
    DensityUnderflow {
        x: f64,
        y: f64,
        t: f64,
        ln_density: f64,
    },

    #[error("operation requires a {expected} state")]
    WrongKind { expected: &'static str },

    #[error("density {density:e} below oracle floor {floor:e}")]
    NodeProximity { density: f64, floor: f64 },

    #[error("phase step of {step} rad between stencil samples exceeds pi/2")]
    PhaseUnwrapFailure { step: f64 },

    #[error(
        "grid too coarse: {samples_per_period:.2} samples per period, need at least {required}"
    )]
    GridTooCoarse {
        samples_per_period: f64,
        required: usize,
    },

    #[error("no fringes: visibility {visibility:.3e}")]
    NoFringes { visibility: f64 },

    #[error("step size fell below dt_min = {dt_min:e} at t = {t}")]
    StepUnderflow { t: f64, dt_min: f64 },

    #[error("initial condition ({x}, {y}) has density below the floor")]
    InvalidInitialCondition { x: f64, y: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(&'static str),

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}
