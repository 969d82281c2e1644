//! Incomplete gamma functions, including the upper function at negative order.
//!
//! Regions for Γ(a, x):
//! - `a > 0, x < a + 1`: power series for γ(a, x), then Γ(a) − γ(a, x);
//! - `x ≥ max(a + 1, CF_MIN_X)`: Legendre continued fraction, valid for any real `a`;
//! - `a ≤ 0, x` small: downward recurrence
//!   Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a started at a + ⌈|a|⌉ + 1,
//!   or at E₁(x) = Γ(0, x) when `a` is an integer.

use super::{gamma::ln_gamma, is_nonpositive_integer, AccuracySpec, EULER_GAMMA};
use crate::error::{Error, Result};

/// The continued fraction is used for negative order only above this point.
const CF_MIN_X: f64 = 1.5;

const CF_MAX_ITER: usize = 5_000;

/// Σ_{n≥0} x^n / (a (a+1) ... (a+n)), so that γ(a, x) = x^a e^{-x} · series.
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let acc = AccuracySpec::machine();
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut small = 0;
    for n in 1..acc.max_terms {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() <= acc.rel_tol * sum.abs() {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        function: "incomplete_gamma",
        terms: acc.max_terms,
    })
}

/// Continued fraction h with Γ(a, x) = x^a e^{-x} h (modified Lentz).
fn upper_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        function: "incomplete_gamma",
        terms: CF_MAX_ITER,
    })
}

/// E₁(x) = Γ(0, x) for x > 0.
pub fn exponential_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("exponential_integral_e1", "requires x > 0"));
    }
    if x >= CF_MIN_X {
        return Ok((-x).exp() * upper_fraction(0.0, x)?);
    }
    // E₁(x) = -γ - ln x - Σ_{n≥1} (-x)^n / (n n!)
    let acc = AccuracySpec::machine();
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..acc.max_terms {
        let nf = n as f64;
        term *= -x / nf;
        let contrib = term / nf;
        sum += contrib;
        if contrib.abs() <= 1e-17 * sum.abs() {
            return Ok(-EULER_GAMMA - x.ln() - sum);
        }
    }
    Err(Error::NonConvergence {
        function: "exponential_integral_e1",
        terms: acc.max_terms,
    })
}

fn check_args(function: &'static str, x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::domain(function, "x is NaN"));
    }
    if x < 0.0 {
        return Err(Error::domain(function, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

/// P(a, x) = γ(a, x) / Γ(a).
pub fn lower_incomplete_gamma_regularized(a: f64, x: f64) -> Result<f64> {
    check_args("lower_incomplete_gamma_regularized", x)?;
    if !(a > 0.0) {
        return Err(Error::domain(
            "lower_incomplete_gamma_regularized",
            format!("a = {a} must be positive"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a)?;
    if x < a + 1.0 {
        Ok((log_prefactor.exp() * lower_series(a, x)?).min(1.0))
    } else {
        Ok(1.0 - (log_prefactor.exp() * upper_fraction(a, x)?).min(1.0))
    }
}

/// Q(a, x) = Γ(a, x) / Γ(a); accurate in the upper tail where 1 − P is not.
pub fn upper_incomplete_gamma_regularized(a: f64, x: f64) -> Result<f64> {
    check_args("upper_incomplete_gamma_regularized", x)?;
    if !(a > 0.0) {
        return Err(Error::domain(
            "upper_incomplete_gamma_regularized",
            format!("a = {a} must be positive"),
        ));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a)?;
    if x < a + 1.0 {
        Ok(1.0 - (log_prefactor.exp() * lower_series(a, x)?).min(1.0))
    } else {
        Ok((log_prefactor.exp() * upper_fraction(a, x)?).min(1.0))
    }
}

/// Γ(a, x) for x > 0 and any real a, with the recurrence for small x, a ≤ 0.
fn upper_positive_x(a: f64, x: f64) -> Result<f64> {
    if a > 0.0 {
        if x < a + 1.0 {
            let lg = ln_gamma(a)?;
            let p = ((a * x.ln() - x - lg).exp() * lower_series(a, x)?).min(1.0);
            return Ok(lg.exp() * (1.0 - p));
        }
        return Ok((a * x.ln() - x).exp() * upper_fraction(a, x)?);
    }
    if x >= CF_MIN_X {
        return Ok((a * x.ln() - x).exp() * upper_fraction(a, x)?);
    }
    let (mut order, mut value) = if a == a.floor() {
        (0.0, exponential_integral_e1(x)?)
    } else {
        let start = a + a.abs().ceil() + 1.0;
        (start, upper_positive_x(start, x)?)
    };
    let ln_x = x.ln();
    while order > a + 0.5 {
        let lower = order - 1.0;
        value = (value - (lower * ln_x - x).exp()) / lower;
        order = lower;
    }
    Ok(value)
}

/// Upper incomplete gamma Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt for real `a`.
///
/// Negative orders are supported for x > 0. At x = 0 the value is Γ(a) for
/// a > 0; for a ≤ 0 the integral diverges and an error is returned.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    check_args("upper_incomplete_gamma", x)?;
    if a.is_nan() {
        return Err(Error::domain("upper_incomplete_gamma", "a is NaN"));
    }
    if x == 0.0 {
        if a > 0.0 {
            return super::gamma::gamma(a);
        }
        if is_nonpositive_integer(a) {
            return Err(Error::Pole {
                function: "upper_incomplete_gamma",
                value: a,
            });
        }
        return Err(Error::Divergence {
            function: "upper_incomplete_gamma",
            message: format!("order {a} ≤ 0 at x = 0"),
        });
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    upper_positive_x(a, x)
}

/// e^x · Γ(a, x), finite for arguments where e^x alone overflows.
pub fn upper_incomplete_gamma_scaled(a: f64, x: f64) -> Result<f64> {
    check_args("upper_incomplete_gamma_scaled", x)?;
    if x > 0.0 && x.is_finite() && x >= a + 1.0 && x >= CF_MIN_X {
        return Ok((a * x.ln()).exp() * upper_fraction(a, x)?);
    }
    Ok(x.exp() * upper_incomplete_gamma(a, x)?)
}
