//! Coverage and ergodic-capacity analysis of downlinks from high-altitude
//! platforms (HAPs) assisted by reconfigurable intelligent surfaces (RISs),
//! with a seeded Monte Carlo simulator for cross-checking the closed forms.
//!
//! Modules, from the bottom up:
//!
//! - [`specfun`]: gamma, incomplete gamma and hypergeometric functions,
//! - [`geometry`]: Poisson-field distances and their inverse-power moments,
//! - [`fading`]: small-scale fading moments and samplers,
//! - [`analytic`]: Gamma approximation, coverage and capacity,
//! - [`montecarlo`]: simulation of the same quantities,
//! - [`cli`]: configuration, figure sweeps and the validation report.

// Domain guards are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
