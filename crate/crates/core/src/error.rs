use alloc::string::String;

use crate::dyadic::DyadicCube;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The parameter tuple is valid but violates a regime hypothesis
    /// (e.g. `alpha * p <= n`).
    #[error("regime error: {0}")]
    Regime(String),

    /// A family that was required to be regular fails the packing
    /// inequality at `cube`.
    #[error("packing inequality fails at {cube}: weight {weight} > side^tau {bound}")]
    NotRegular {
        cube: DyadicCube,
        weight: f64,
        bound: f64,
    },

    /// A supremum or integral is infinite.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Least-squares fit could not be formed.
    #[error("fit error: {0}")]
    Fit(String),

    /// Quadrature or iteration failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The evaluation error is too large for the requested difference scale.
    #[error("precision error: {0}")]
    Precision(String),
}

impl Error {
    /// True for errors caused by bad input, as opposed to numerical failures.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Regime(_) | Error::NotRegular { .. } | Error::Fit(_)
        )
    }
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
