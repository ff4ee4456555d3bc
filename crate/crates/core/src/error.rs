use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step {step} leaves only {cells} cells across [0, {extent}] (at least {min} required)")]
    StepTooCoarse {
        step: f64,
        extent: f64,
        cells: usize,
        min: usize,
    },

    #[error("non-finite value encountered at x = {x} while propagating k = {k}")]
    NonFinite { k: f64, x: f64 },

    #[error("x = {x} is not a grid point of the samples")]
    OffGrid { x: f64 },

    #[error("x = {x} lies outside the sampled range [-{extent}, {extent}]")]
    OutOfRange { x: f64, extent: f64 },

    #[error("matching point {at} lies inside the potential support (x_b = {edge})")]
    MatchingInsideSupport { at: f64, edge: f64 },

    #[error("wavenumbers {k} and {kprime} are degenerate (|k - k'| < {threshold}); use the equal-k overlap")]
    DegenerateK { k: f64, kprime: f64, threshold: f64 },

    #[error("samples live on incompatible grids (steps {step_a} and {step_b})")]
    IncompatibleGrids { step_a: f64, step_b: f64 },

    #[error("asymptotic amplitude vanishes; the state cannot be normalized")]
    ZeroAmplitude,

    #[error("amplitude (k = {amp_k}) was not extracted from these samples (k = {samples_k})")]
    AmplitudeMismatch { samples_k: f64, amp_k: f64 },

    #[error("window too small: {product_name} = {product} is below the required {min}")]
    WindowTooSmall {
        product_name: &'static str,
        product: f64,
        min: f64,
    },

    #[error("potential supports bound states ({0}); the continuum alone is not complete")]
    BoundStatesPossible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}
