//! Special functions used by the closed-form channel analysis.
//!
//! Everything here is real-valued double precision. The hypergeometric
//! series share one truncation rule: summation stops once three consecutive
//! terms are at most `rel_tol` times the running partial sum, which keeps
//! alternating series from stopping on a single accidental small term.
//!
//! Accuracy targets (relative, away from poles and cancellation zones):
//!
//! | function                     | target  |
//! |------------------------------|---------|
//! | `ln_gamma`, `gamma`          | 1e-14   |
//! | `digamma`                    | 1e-14   |
//! | incomplete gamma (all forms) | 1e-12   |
//! | hypergeometric series        | `rel_tol` plus rounding of the largest term |

mod gamma;
mod hyper;
mod incgamma;

pub use gamma::{cos_pi, digamma, gamma, ln_gamma, ln_gamma_signed, recip_gamma, sin_pi};
pub use hyper::{
    gauss_2f1, gauss_2f1_with, generalized_pfq, generalized_pfq_series, kummer_1f1,
    kummer_1f1_with, SeriesSum,
};
pub use incgamma::{
    exponential_integral_e1, lower_incomplete_gamma_regularized, upper_incomplete_gamma,
    upper_incomplete_gamma_regularized, upper_incomplete_gamma_scaled,
};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Truncation controls for series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for AccuracySpec {
    fn default() -> Self {
        AccuracySpec {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl AccuracySpec {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        Ok(AccuracySpec { rel_tol, max_terms })
    }

    /// Tolerance used internally where a kernel should be good to rounding.
    pub(crate) const fn machine() -> Self {
        AccuracySpec {
            rel_tol: 1e-17,
            max_terms: 100_000,
        }
    }
}

/// True when `x` is 0, -1, -2, ...
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}
