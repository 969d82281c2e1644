//! Hypergeometric series ₁F₁, ₂F₁ and the generalized pFq.

use super::{gamma::recip_gamma, is_nonpositive_integer, AccuracySpec};
use crate::error::{Error, Result};

/// Result of a summed series with the magnitude information needed to judge
/// cancellation: `abs_sum` is Σ|termₙ|, so `abs_sum · ε` bounds the rounding
/// error of `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub abs_sum: f64,
    pub terms: usize,
}

/// Sums Σ tₙ with t₀ = 1 and tₙ₊₁ = tₙ · ratio(n).
fn sum_unit_series(
    function: &'static str,
    acc: &AccuracySpec,
    mut ratio: impl FnMut(f64) -> f64,
) -> Result<SeriesSum> {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut abs_sum = 1.0f64;
    let mut small = 0;
    for n in 0..acc.max_terms {
        term *= ratio(n as f64);
        sum += term;
        abs_sum += term.abs();
        if !sum.is_finite() {
            return Err(Error::NonConvergence {
                function,
                terms: n + 1,
            });
        }
        if term.abs() <= acc.rel_tol * sum.abs() {
            small += 1;
            if small == 3 {
                return Ok(SeriesSum {
                    value: sum,
                    abs_sum,
                    terms: n + 2,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        function,
        terms: acc.max_terms,
    })
}

fn check_denominators(function: &'static str, params: &[f64]) -> Result<()> {
    for &b in params {
        if b.is_nan() {
            return Err(Error::domain(function, "parameter is NaN"));
        }
        if is_nonpositive_integer(b) {
            return Err(Error::Pole { function, value: b });
        }
    }
    Ok(())
}

/// Generalized hypergeometric series with its magnitude bookkeeping.
///
/// Requires p ≤ q + 1, and |z| < 1 when p = q + 1.
pub fn generalized_pfq_series(
    numerator: &[f64],
    denominator: &[f64],
    z: f64,
    acc: &AccuracySpec,
) -> Result<SeriesSum> {
    const NAME: &str = "generalized_pfq";
    check_denominators(NAME, denominator)?;
    if z.is_nan() || numerator.iter().any(|a| a.is_nan()) {
        return Err(Error::domain(NAME, "argument is NaN"));
    }
    if numerator.len() > denominator.len() + 1 {
        return Err(Error::domain(NAME, "p > q + 1: series diverges for z ≠ 0"));
    }
    if numerator.len() == denominator.len() + 1 && z.abs() >= 1.0 {
        return Err(Error::domain(NAME, format!("|z| = {} ≥ 1 with p = q + 1", z.abs())));
    }
    if z == 0.0 {
        return Ok(SeriesSum {
            value: 1.0,
            abs_sum: 1.0,
            terms: 1,
        });
    }
    sum_unit_series(NAME, acc, |n| {
        let mut r = z / (n + 1.0);
        for &a in numerator {
            r *= a + n;
        }
        for &b in denominator {
            r /= b + n;
        }
        r
    })
}

/// pFq(a₁..a_p; b₁..b_q; z) with the default accuracy.
pub fn generalized_pfq(numerator: &[f64], denominator: &[f64], z: f64) -> Result<f64> {
    generalized_pfq_series(numerator, denominator, z, &AccuracySpec::default()).map(|s| s.value)
}

/// Confluent hypergeometric ₁F₁(a; b; x). Negative `x` goes through Kummer's
/// transformation e^x ₁F₁(b − a; b; −x) so the series never alternates.
pub fn kummer_1f1_with(a: f64, b: f64, x: f64, acc: &AccuracySpec) -> Result<f64> {
    const NAME: &str = "kummer_1f1";
    check_denominators(NAME, &[b])?;
    if x < 0.0 && !is_nonpositive_integer(a) {
        return Ok(x.exp() * kummer_1f1_with(b - a, b, -x, acc)?);
    }
    generalized_pfq_series(&[a], &[b], x, acc)
        .map(|s| s.value)
        .map_err(|e| rename(e, NAME))
}

pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    kummer_1f1_with(a, b, x, &AccuracySpec::default())
}

/// Gauss hypergeometric ₂F₁(a, b; c; z) for |z| < 1.
///
/// - z < −½: Pfaff transformation (1 − z)^{−b} ₂F₁(c − a, b; c; z/(z − 1)),
///   which maps the argument into (⅓, ½).
/// - z > ½ with c − a − b not an integer: connection formula around z = 1.
/// - otherwise the direct series; when c − a − b is an integer and z is near 1
///   this converges slowly and relies on `max_terms`.
///
/// (a, b) are put in a canonical order first so the result is exactly
/// symmetric in them.
pub fn gauss_2f1_with(a: f64, b: f64, c: f64, z: f64, acc: &AccuracySpec) -> Result<f64> {
    const NAME: &str = "gauss_2f1";
    check_denominators(NAME, &[c])?;
    if z.is_nan() || a.is_nan() || b.is_nan() {
        return Err(Error::domain(NAME, "argument is NaN"));
    }
    if z.abs() >= 1.0 {
        return Err(Error::domain(NAME, format!("|z| = {} must be < 1", z.abs())));
    }
    let (a, b) = if a.total_cmp(&b).is_le() { (a, b) } else { (b, a) };
    if z == 0.0 {
        return Ok(1.0);
    }
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if z < -0.5 && !terminating {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-b) * gauss_2f1_with(c - a, b, c, w, acc)?);
    }
    let s = c - a - b;
    if z > 0.5 && !terminating && (s - s.round()).abs() > 1e-6 {
        let w = 1.0 - z;
        let g_c = super::gamma::gamma(c)?;
        let first = g_c * super::gamma::gamma(s)? * recip_gamma(c - a) * recip_gamma(c - b);
        let second = g_c * super::gamma::gamma(-s)? * recip_gamma(a) * recip_gamma(b);
        let mut total = 0.0;
        if first != 0.0 {
            total += first * series_2f1(a, b, a + b - c + 1.0, w, acc)?;
        }
        if second != 0.0 {
            total += second * w.powf(s) * series_2f1(c - a, c - b, s + 1.0, w, acc)?;
        }
        return Ok(total);
    }
    series_2f1(a, b, c, z, acc)
}

fn series_2f1(a: f64, b: f64, c: f64, z: f64, acc: &AccuracySpec) -> Result<f64> {
    // the neglected tail is about term · |z| / (1 − |z|)
    let acc = AccuracySpec {
        rel_tol: acc.rel_tol * (1.0 - z.abs()),
        ..*acc
    };
    generalized_pfq_series(&[a, b], &[c], z, &acc)
        .map(|s| s.value)
        .map_err(|e| rename(e, "gauss_2f1"))
}

pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    gauss_2f1_with(a, b, c, z, &AccuracySpec::default())
}

fn rename(err: Error, function: &'static str) -> Error {
    match err {
        Error::Pole { value, .. } => Error::Pole { function, value },
        Error::NonConvergence { terms, .. } => Error::NonConvergence { function, terms },
        Error::Domain { message, .. } => Error::Domain { function, message },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kummer_reductions() {
        assert!(rel(kummer_1f1(1.0, 1.0, 1.0).unwrap(), E) < 1e-12);
        assert_eq!(kummer_1f1(0.7, 2.3, 0.0).unwrap(), 1.0);
        assert!(rel(kummer_1f1(2.0, 1.0, 10.0).unwrap(), 10f64.exp() * 11.0) < 1e-12);
        // negative argument through Kummer's transformation: ₁F₁(1;1;-3) = e^{-3}
        assert!(rel(kummer_1f1(1.0, 1.0, -3.0).unwrap(), (-3f64).exp()) < 1e-12);
    }

    #[test]
    fn gauss_reductions() {
        assert_eq!(gauss_2f1(1.5, 0.7, 1.0, 0.0).unwrap(), 1.0);
        let z = 0.5;
        assert!(rel(gauss_2f1(1.0, 1.0, 2.0, z).unwrap(), -(1.0f64 - z).ln() / z) < 1e-12);
        // through the connection formula and the Pfaff branch
        for z in [0.8, 0.95, -0.7, -0.99] {
            let exact = -(1.0f64 - z).ln() / z;
            assert!(rel(gauss_2f1(1.0, 1.0, 2.0, z).unwrap(), exact) < 1e-11, "z = {z}");
        }
        // ₂F₁(a, b; b; z) = (1 - z)^{-a}, with c - a - b non-integer
        for z in [0.3, 0.9, -0.8] {
            let v = gauss_2f1(0.4, 1.3, 1.3, z).unwrap();
            assert!(rel(v, (1.0f64 - z).powf(-0.4)) < 1e-11, "z = {z}");
        }
    }

    #[test]
    fn gauss_is_symmetric_bitwise() {
        for &(a, b, z) in &[(1.5, 0.739, 0.00705), (0.3, 2.2, 0.8), (1.1, -0.4, -0.9)] {
            assert_eq!(
                gauss_2f1(a, b, 1.0, z).unwrap().to_bits(),
                gauss_2f1(b, a, 1.0, z).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(gauss_2f1(1.0, 1.0, -2.0, 0.1), Err(Error::Pole { .. })));
        assert!(matches!(gauss_2f1(1.0, 1.0, 2.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(kummer_1f1(1.0, 0.0, 1.0), Err(Error::Pole { .. })));
        assert!(matches!(
            generalized_pfq(&[1.0], &[0.5, -1.0], 0.1),
            Err(Error::Pole { .. })
        ));
        let tight = AccuracySpec::new(1e-12, 5).unwrap();
        assert!(matches!(
            generalized_pfq_series(&[1.0], &[1.0], 50.0, &tight),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn terminating_series() {
        // ₂F₁(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (1.5, 2.5, 0.9);
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(gauss_2f1(-2.0, b, c, z).unwrap(), exact) < 1e-14);
    }
}
