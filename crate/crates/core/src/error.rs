use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("steady state is not unique (null space of the Liouvillian is degenerate)")]
    NonUniqueSteadyState,

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SteadyStateResidual { residual: f64, tolerance: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("zero denominator in correlation: <{which}> = {value:.3e}")]
    ZeroDenominator { which: &'static str, value: f64 },

    #[error("mode photon number is zero")]
    ZeroPhotonNumber,

    #[error("found {found} transmission dips in the window, need at least two")]
    FewerThanTwoDips { found: usize },

    #[error("sweep failed at grid point {index} (value {value:.6}): {source}")]
    GridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_grid_point(self, index: usize, value: f64) -> Self {
        Error::GridPoint {
            index,
            value,
            source: Box::new(self),
        }
    }
}
