use std::f64::consts::PI;

use super::is_nonpositive_integer;
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument the Stirling series is entered through the recurrence.
const STIRLING_MIN: f64 = 10.0;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2k} / (2k), k = 1..8
const DIGAMMA_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// sin(πx) with exact argument reduction, so zeros at integers are exact.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // r in [-1, 1], exact in binary floating point
    let r = x - 2.0 * (x / 2.0).round();
    let (r, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let v = if r == 0.0 || r == 1.0 {
        0.0
    } else if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    sign * v
}

/// cos(πx) with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = (x - 2.0 * (x / 2.0).round()).abs();
    if r == 0.5 {
        0.0
    } else if r <= 0.25 {
        (PI * r).cos()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).sin()
    } else {
        -(PI * (1.0 - r)).cos()
    }
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

fn small_factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ln|Γ(x)| together with the sign of Γ(x).
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() {
        return Err(Error::domain("ln_gamma", "argument is NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "ln_gamma",
            value: x,
        });
    }
    if x == f64::INFINITY {
        return Ok((f64::INFINITY, 1.0));
    }
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let s = sin_pi(x);
        let (lg, _) = ln_gamma_signed(1.0 - x)?;
        return Ok((PI.ln() - s.abs().ln() - lg, s.signum()));
    }
    if x == x.floor() && x <= 30.0 {
        return Ok((small_factorial(x as u32 - 1).ln(), 1.0));
    }
    if x >= STIRLING_MIN {
        return Ok((stirling_ln_gamma(x), 1.0));
    }
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < STIRLING_MIN {
        product *= shifted;
        shifted += 1.0;
    }
    Ok((stirling_ln_gamma(shifted) - product.ln(), 1.0))
}

/// ln|Γ(x)|; use [`ln_gamma_signed`] when the sign matters.
pub fn ln_gamma(x: f64) -> Result<f64> {
    ln_gamma_signed(x).map(|(v, _)| v)
}

/// Γ(x). Overflows to ±∞ above x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    if x == x.floor() && (1.0..=30.0).contains(&x) {
        return Ok(small_factorial(x as u32 - 1));
    }
    let (lg, sign) = ln_gamma_signed(x)?;
    Ok(sign * lg.exp())
}

/// 1/Γ(x), which is entire: zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    match ln_gamma_signed(x) {
        Ok((lg, sign)) => sign * (-lg).exp(),
        Err(_) => f64::NAN,
    }
}

/// ψ(x) = d/dx ln Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("digamma", "argument is NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "digamma",
            value: x,
        });
    }
    if x < 0.0 {
        // ψ(1-x) - ψ(x) = π cot(πx)
        return Ok(digamma(1.0 - x)? - PI * cos_pi(x) / sin_pi(x));
    }
    let mut shifted = x;
    let mut acc = 0.0;
    while shifted < STIRLING_MIN {
        acc -= 1.0 / shifted;
        shifted += 1.0;
    }
    let inv = 1.0 / shifted;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_COEFFS {
        series += c * pow;
        pow *= inv2;
    }
    Ok(acc + shifted.ln() - 0.5 * inv - series)
}
