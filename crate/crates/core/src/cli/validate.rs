//! The `validate` report: the closed forms checked against independent
//! numerics and against the simulator.
//!
//! Statistical checks are only judged when the sample is large enough for
//! the tolerance to exceed three standard errors of the compared estimate
//! (and at least [`MIN_SAMPLES`] draws, so the standard errors themselves are
//! trustworthy). Otherwise they are reported as inconclusive, which does not
//! fail the run.

use std::f64::consts::{LN_2, PI};

use rand_distr::Distribution;
use serde::Serialize;

use super::config::{db_to_linear, Preset, RunConfig};
use super::figures::fig3_thresholds_db;
use crate::analytic::{
    channel_moments, coverage_probability, ergodic_capacity, ergodic_capacity_closed_form,
    ergodic_capacity_quadrature, gamma_approx, LinkMode, MomentRoute, SystemModel,
};
use crate::error::{Error, Result};
use crate::fading::{
    rayleigh_moment, rician_moment, shadowed_rician_moment, RayleighEnvelope, RicianEnvelope,
    ShadowedRicianEnvelope,
};
use crate::geometry::{nearest_distance_pdf, LinkGeometry};
use crate::montecarlo::{map_chunks, SamplingMode, Simulator};
use crate::quad::{integrate_pieces, QuadSpec};
use crate::specfun::{
    digamma, gamma, gauss_2f1, kummer_1f1, lower_incomplete_gamma_regularized,
    upper_incomplete_gamma, upper_incomplete_gamma_regularized, EULER_GAMMA,
};

/// Smallest sample for which a statistical check is judged at all.
pub const MIN_SAMPLES: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    /// Reported for information only.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// The compared discrepancy (or the reported quantity for `info`).
    pub value: f64,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub preset: String,
    pub elements: u32,
    pub n_samples: u64,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn judged(name: &str, value: f64, tolerance: f64, detail: String) -> Check {
    Check {
        name: name.to_string(),
        status: if value <= tolerance { Status::Pass } else { Status::Fail },
        value,
        tolerance: Some(tolerance),
        detail,
    }
}

/// A statistical check: `value` against `tolerance`, inconclusive when the
/// estimate's noise (`noise`, in the units of `value`) is too large.
fn statistical(name: &str, value: f64, tolerance: f64, noise: f64, n: u64, detail: String) -> Check {
    let mut c = judged(name, value, tolerance, detail);
    if n < MIN_SAMPLES || 3.0 * noise > tolerance {
        c.status = Status::Inconclusive;
        c.detail.push_str("; sample too small to judge");
    }
    c
}

/// A "within k standard errors" check.
fn within_se(name: &str, estimate: f64, se: f64, expected: f64, n: u64, detail: String) -> Check {
    let z = if se > 0.0 { (estimate - expected).abs() / se } else { f64::INFINITY };
    let mut c = judged(name, z, 3.0, detail);
    if n < MIN_SAMPLES {
        c.status = Status::Inconclusive;
        c.detail.push_str("; sample too small to judge");
    }
    c
}

fn info(name: &str, value: f64, detail: String) -> Check {
    Check {
        name: name.to_string(),
        status: Status::Info,
        value,
        tolerance: None,
        detail,
    }
}

fn special_function_checks() -> Result<Vec<Check>> {
    const TOL: f64 = 1e-9;
    let mut worst = 0.0f64;
    for x in [0.3, 2.5, 7.1, 12.25] {
        worst = worst.max(rel(gamma(x + 1.0)?, x * gamma(x)?));
    }
    // Γ(a + 1, x) = aΓ(a, x) + x^a e^{−x}, including negative orders
    for &(a, x) in &[(-0.5, 1.3), (-1.5, 0.7), (-2.25, 4.0), (0.5, 2.0)] {
        let lhs = upper_incomplete_gamma(a + 1.0, x)?;
        let rhs = a * upper_incomplete_gamma(a, x)? + x.powf(a) * (-x).exp();
        worst = worst.max(rel(lhs, rhs));
    }
    let gamma_check = judged("specfun.gamma_recurrence", worst, TOL, "Γ(x+1) = xΓ(x) and Γ(a+1,x) = aΓ(a,x) + x^a e^-x".into());

    let mut worst = 0.0f64;
    for &(a, x) in &[(0.5, 0.1), (2.0, 3.0), (5.7, 5.0), (30.0, 25.0)] {
        let p = lower_incomplete_gamma_regularized(a, x)?;
        let q = upper_incomplete_gamma_regularized(a, x)?;
        worst = worst.max((p + q - 1.0).abs());
    }
    let completeness = judged("specfun.incomplete_gamma_completeness", worst, TOL, "P(a,x) + Q(a,x) = 1".into());

    let mut worst = 0.0f64;
    for x in [-2.0, 0.5, 4.0] {
        worst = worst.max(rel(kummer_1f1(1.7, 1.7, x)?, f64::exp(x)));
    }
    for z in [-0.9, 0.3, 0.7] {
        worst = worst.max(rel(gauss_2f1(1.0, 1.0, 2.0, z)?, -(1.0 - z).ln() / z));
    }
    let hyper = judged("specfun.hypergeometric_reductions", worst, TOL, "1F1(a;a;x) = e^x, 2F1(1,1;2;z) = -ln(1-z)/z".into());

    let d = rel(digamma(1.0)?, -EULER_GAMMA).max(rel(digamma(0.5)?, -EULER_GAMMA - 2.0 * LN_2));
    let dig = judged("specfun.digamma_constants", d, TOL, "ψ(1) = -γ, ψ(1/2) = -γ - 2 ln 2".into());
    Ok(vec![gamma_check, completeness, hyper, dig])
}

fn distance_quadrature(link: &LinkGeometry, t: f64) -> Result<f64> {
    let scale = 1.0 / (link.lambda * PI).sqrt();
    let f = |w: f64| {
        nearest_distance_pdf(link.lambda, w).unwrap_or(0.0) * link.slant_range(w).powf(-t * link.eps / 2.0)
    };
    let spec = QuadSpec {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_intervals: 4_000,
    };
    Ok(integrate_pieces(f, &[0.0, scale, 4.0 * scale], &spec)?.value)
}

fn distance_checks(model: &SystemModel) -> Result<Check> {
    let (hap_ris, ris_user) = model.ris_hops();
    let mut worst = 0.0f64;
    for link in [hap_ris, ris_user, model.direct_hop()] {
        for t in [1.0, 2.0] {
            worst = worst.max(rel(link.moment(t)?, distance_quadrature(&link, t)?));
        }
    }
    Ok(judged(
        "geometry.distance_moments",
        worst,
        1e-6,
        "E[R^(-tε/2)] against quadrature, t ∈ {1, 2}, all three links".into(),
    ))
}

fn sampled_moments<D: Distribution<f64> + Sync>(dist: &D, n: u64, seed: u64) -> [(f64, f64); 2] {
    // per power t ∈ {1, 2}: (mean, standard error)
    let parts = map_chunks(n, seed, |rng, count| {
        let mut s = [0.0f64; 4];
        for _ in 0..count {
            let x = dist.sample(rng);
            let x2 = x * x;
            s[0] += x;
            s[1] += x2;
            s[2] += x2;
            s[3] += x2 * x2;
        }
        s
    });
    let mut s = [0.0f64; 4];
    for p in parts {
        for i in 0..4 {
            s[i] += p[i];
        }
    }
    let nf = n as f64;
    let stat = |sum: f64, sum_sq: f64| {
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
        (mean, (var / nf).sqrt())
    };
    [stat(s[0], s[1]), stat(s[2], s[3])]
}

/// Hop label, sampled (mean, standard error) and exact moments for t = 1, 2.
type HopMoments<'a> = (&'a str, [(f64, f64); 2], [f64; 2]);

fn fading_checks(model: &SystemModel, n: u64, seed: u64) -> Result<Vec<Check>> {
    let f = &model.fading;
    let hops: [HopMoments; 3] = [
        (
            "ris_user",
            sampled_moments(&ShadowedRicianEnvelope::new(f.ris_user), n, seed),
            [shadowed_rician_moment(1.0, &f.ris_user)?, shadowed_rician_moment(2.0, &f.ris_user)?],
        ),
        (
            "hap_ris",
            sampled_moments(&RicianEnvelope::new(f.hap_ris), n, seed),
            [rician_moment(1.0, &f.hap_ris)?, rician_moment(2.0, &f.hap_ris)?],
        ),
        (
            "hap_user",
            sampled_moments(&RayleighEnvelope::new(f.hap_user), n, seed),
            [rayleigh_moment(1.0, &f.hap_user)?, rayleigh_moment(2.0, &f.hap_user)?],
        ),
    ];
    let mut out = Vec::new();
    for (hop, sampled, exact) in hops {
        for (t, ((mean, se), expected)) in sampled.into_iter().zip(exact).enumerate() {
            out.push(within_se(
                &format!("fading.{hop}.moment_t{}", t + 1),
                mean,
                se,
                expected,
                n,
                format!("closed form {expected:.6e}, sampled {mean:.6e} ± {se:.1e} (value in standard errors)"),
            ));
        }
    }
    Ok(out)
}

fn channel_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let model = &cfg.model;
    let (n, seed) = (cfg.n_samples, cfg.seed);
    let g = gamma_approx(model)?;
    let sim = Simulator::new(model, SamplingMode::Distance)?;
    let gains = sim.gains(n, seed)?;
    let nf = n as f64;
    let mean = gains.iter().sum::<f64>() / nf;
    let m2 = gains.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let m4 = gains.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let var = m2 * nf / (nf - 1.0).max(1.0);
    let mean_se = (var / nf).sqrt();
    let var_se = ((m4 - m2 * m2).max(0.0) / nf).sqrt();

    let mut out = vec![
        within_se(
            "channel.mean_abs_a",
            mean,
            mean_se,
            g.mean_a,
            n,
            format!("composed {:.6e}, simulated {mean:.6e} ± {mean_se:.1e} (value in standard errors)", g.mean_a),
        ),
        statistical(
            "channel.var_abs_a",
            rel(var, g.var_a),
            0.05,
            var_se / g.var_a,
            n,
            format!("composed {:.6e}, simulated {var:.6e} (value is relative difference)", g.var_a),
        ),
    ];

    let rho0 = model.rho0();
    let grid = fig3_thresholds_db();
    let thresholds: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
    let mc = sim.coverage(&thresholds, n, seed)?;
    let mut worst = (0.0f64, grid[0]);
    for ((&db, &th), est) in grid.iter().zip(&thresholds).zip(&mc) {
        let d = (coverage_probability(&g, rho0, th)? - est.value).abs();
        if d > worst.0 {
            worst = (d, db);
        }
    }
    out.push(statistical(
        "coverage.analytic_vs_mc",
        worst.0,
        0.02,
        0.5 / nf.sqrt(),
        n,
        format!("largest absolute gap over -10..30 dB, at {} dB", worst.1),
    ));

    let cap = ergodic_capacity(&g, rho0)?;
    let mc = sim.capacity(n, seed)?;
    out.push(statistical(
        "capacity.analytic_vs_mc",
        rel(cap.bits, mc.value),
        0.02,
        mc.std_error / mc.value,
        n,
        format!(
            "{} {:.6}, simulated {:.6} ± {:.1e} (value is relative difference)",
            cap.method.as_str(),
            cap.bits,
            mc.value,
            mc.std_error
        ),
    ));

    out.push(match ergodic_capacity_closed_form(&g, rho0) {
        Ok(cf) => {
            let q = ergodic_capacity_quadrature(&g, rho0)?;
            judged(
                "capacity.closed_form_vs_quadrature",
                rel(cf, q),
                1e-4,
                format!("closed form {cf:.10}, quadrature {q:.10}"),
            )
        }
        Err(e @ (Error::PoleProximity { .. } | Error::IllConditioned { .. })) => info(
            "capacity.closed_form_vs_quadrature",
            f64::NAN,
            format!("closed form not evaluated here ({e}); quadrature used"),
        ),
        Err(e) => return Err(e),
    });
    Ok(out)
}

/// Relative difference between the mean from the printed constants and the
/// composed mean, per preset.
fn literal_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in Preset::ALL {
        let model = SystemModel {
            fading: p.fading(),
            mode: LinkMode::RisAssisted,
            ..cfg.model
        };
        let composed = channel_moments(&model, MomentRoute::Composed)?;
        let literal = channel_moments(&model, MomentRoute::LiteralDisplay)?;
        let d = (literal.mean() - composed.mean()) / composed.mean();
        let v = (literal.variance() - composed.variance()) / composed.variance();
        out.push(info(
            &format!("moments.literal_vs_composed.{}", p.name()),
            d,
            format!(
                "mean: literal {:.6e} vs composed {:.6e}; variance relative delta {v:.4}",
                literal.mean(),
                composed.mean()
            ),
        ));
    }
    Ok(out)
}

fn field_check(cfg: &RunConfig) -> Result<Check> {
    let (n, seed) = (cfg.n_samples, cfg.seed);
    let distance = Simulator::new(&cfg.model, SamplingMode::Distance)?.capacity(n, seed)?;
    let field = Simulator::with_policy(&cfg.model, SamplingMode::Field, cfg.serving)?.capacity(n, seed)?;
    Ok(info(
        "capacity.field_vs_distance",
        (field.value - distance.value) / distance.value,
        format!(
            "field {:.6} ± {:.1e}, distance {:.6} ± {:.1e} (relative delta)",
            field.value, field.std_error, distance.value, distance.std_error
        ),
    ))
}

pub fn run_validate(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut checks = special_function_checks()?;
    checks.push(distance_checks(&cfg.model)?);
    checks.extend(fading_checks(&cfg.model, cfg.n_samples, cfg.seed)?);
    checks.extend(channel_checks(cfg)?);
    checks.extend(literal_checks(cfg)?);
    checks.push(field_check(cfg)?);
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(Report {
        preset: cfg.preset_label().to_string(),
        elements: cfg.model.l_elements,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        passed,
        checks,
    })
}
