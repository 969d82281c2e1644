//! Oracles shared by the integration tests. Nothing here calls the numerical
//! kernels under test: quadrature, series and special values are computed
//! independently.

#![allow(dead_code)]

use std::f64::consts::PI;

use hapris::analytic::{ExponentPairing, LinkBudget, LinkMode, SystemModel};
use hapris::fading::FadingScenario;
use hapris::geometry::NetworkGeometry;

pub const RHO0_PAPER: f64 = 1.584_893_192_461_113_5e13;

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn paper_geometry() -> NetworkGeometry {
    NetworkGeometry {
        lambda_hap: 5e-7,
        lambda_ris: 5e-4,
        h_hap: 50_000.0,
        h_ris: 50.0,
        eps_g: 2.0,
        eps_q: 3.0,
        eps_u: 3.0,
    }
}

pub fn paper_model(fading: FadingScenario, l: u32, mode: LinkMode) -> SystemModel {
    SystemModel {
        geometry: paper_geometry(),
        fading,
        budget: LinkBudget {
            e_s: 10.0,
            n0: 10f64.powf(-12.2),
        },
        l_elements: l,
        mode,
        pairing: ExponentPairing::PerLink,
    }
}

pub fn scenarios() -> [(&'static str, FadingScenario); 2] {
    [
        ("fhs-sf", FadingScenario::frequent_heavy_shadowing()),
        ("ils-wf", FadingScenario::infrequent_light_shadowing()),
    ]
}

/// Adaptive Simpson quadrature on [a, b].
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// ∫ f over consecutive break points, summing Simpson pieces.
pub fn simpson_pieces(f: &dyn Fn(f64) -> f64, breaks: &[f64], rel_tol: f64) -> f64 {
    let rough: f64 = breaks
        .windows(2)
        .map(|w| simpson(f, w[0], w[1], f64::MAX).abs())
        .sum();
    let tol = rel_tol * rough.max(f64::MIN_POSITIVE);
    breaks.windows(2).map(|w| simpson(f, w[0], w[1], tol / breaks.len() as f64)).sum()
}

/// E[R^{−tε/2}] for R = √(ω² + h²) with ω nearest-neighbour distributed,
/// by quadrature in u = λπω² (so the weight is e^{−u}).
pub fn distance_moment_oracle(t: f64, eps: f64, lambda: f64, h: f64) -> f64 {
    let k = t * eps / 4.0;
    let c = lambda * PI;
    // in u: E = ∫ e^{−u} (u/c + h²)^{−k} du; factor out h^{−2k} for scale
    let f = |u: f64| (-u).exp() * (u / (c * h * h) + 1.0).powf(-k);
    let breaks = [0.0, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 80.0];
    h.powf(-2.0 * k) * simpson_pieces(&f, &breaks, 1e-12)
}

/// Σ tₙ for a pFq series, summed naively in f64 until terms are negligible.
pub fn pfq_oracle(a: &[f64], b: &[f64], z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..100_000 {
        let n = n as f64;
        let mut r = z / (n + 1.0);
        for &x in a {
            r *= x + n;
        }
        for &x in b {
            r /= x + n;
        }
        term *= r;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && n > 5.0 {
            break;
        }
    }
    sum
}

/// Modified Bessel function I₀ by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..2000 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Log-gamma by Lanczos (g = 7, n = 9), independent of the crate's Stirling
/// implementation.
pub fn ln_gamma_oracle(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_oracle(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// E[log₂(1 + ρ₀X²)] for X ~ Gamma(α, β), by Simpson quadrature in s = X/β.
/// On [0, 1] the substitution v = s^α removes the singular density.
pub fn capacity_oracle(alpha: f64, beta: f64, rho0: f64) -> f64 {
    let lg = ln_gamma_oracle(alpha);
    let scale = rho0 * beta * beta;
    let g = |s: f64| (scale * s * s).ln_1p() / std::f64::consts::LN_2;
    let near = |v: f64| {
        let s = v.powf(1.0 / alpha);
        g(s) * (-s - lg).exp() / alpha
    };
    let head = simpson_pieces(&near, &[0.0, 1e-6, 1e-3, 0.1, 1.0], 1e-13);
    let far = |s: f64| g(s) * ((alpha - 1.0) * s.ln() - s - lg).exp();
    let top = alpha + 40.0 * alpha.sqrt() + 60.0;
    let breaks: Vec<f64> = (0..=400).map(|k| 1.0 + (top - 1.0) * k as f64 / 400.0).collect();
    head + simpson_pieces(&far, &breaks, 1e-13)
}
