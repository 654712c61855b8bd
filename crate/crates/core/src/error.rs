use thiserror::Error;

use crate::quadrature::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidInput {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `b1 + b0 = 0` or `b1 + eps b0 = 0`; only possible for vacuum at the branch point.
    #[error("degenerate interface denominator at c k / omega = {x}")]
    DegenerateInterface { x: f64 },

    /// Slab multiple-reflection denominator vanished (lossless guided mode on the real axis).
    #[error("guided-mode pole of the slab reflection at c k / omega = {x}")]
    GuidedModePole { x: f64 },

    #[error(
        "decay-rate factor needs Im eps > 0 for a finite lossless slab \
         (guided-mode poles sit on the integration path)"
    )]
    LosslessSlab,

    #[error(
        "quadrature for {quantity} did not converge: value {:e}, error estimate {:e}, {} evaluations",
        partial.value, partial.error_estimate, partial.evaluations
    )]
    Quadrature {
        quantity: &'static str,
        partial: QuadratureResult,
    },

    #[error("effective occupation {n_eff:e} outside [{low:e}, {high:e}]; numerical fault")]
    SandwichViolation { n_eff: f64, low: f64, high: f64 },
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidInput {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidInput {
            name,
            value,
            reason: "must be non-negative",
        })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidInput {
            name,
            value,
            reason: "must be strictly positive",
        })
    }
}
