//! Small-scale fading on the three hops and its envelope moments.
//!
//! - RIS→user: shadowed Rician (Rician factor K, Nakagami shadowing m),
//! - HAP→RIS: Rician,
//! - HAP→user: Rayleigh.
//!
//! All families are parameterized by the mean envelope power σ² = E[|h|²].
//! For the Rician families the line-of-sight power is Ω = σ²K/(1+K) and the
//! scattered power is 2b = σ²/(1+K).
//!
//! The samplers realize the shadowed-Rician law as a Rician envelope whose
//! line-of-sight power is Gamma(m, Ω/m) distributed. The line-of-sight phase
//! is dropped: the scatter term is circularly symmetric so the envelope law
//! does not depend on it.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gamma, gauss_2f1, kummer_1f1};

fn check_order(function: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("order t = {t} must be ≥ 0")))
    }
}

fn check_power(field: &str, sigma2: f64) -> Result<()> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("mean power {sigma2} must be positive")))
    }
}

fn check_non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{v} must be non-negative")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowedRicianParams {
    pub k: f64,
    pub m: f64,
    pub sigma2: f64,
}

impl ShadowedRicianParams {
    pub fn new(k: f64, m: f64, sigma2: f64) -> Result<Self> {
        let p = ShadowedRicianParams { k, m, sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("k_g", self.k)?;
        check_non_negative("m_g", self.m)?;
        check_power("sigma2_g", self.sigma2)
    }

    /// Ω, the mean line-of-sight power.
    pub fn los_power(&self) -> f64 {
        self.sigma2 * self.k / (1.0 + self.k)
    }

    /// 2b, the mean scattered power.
    pub fn scatter_power(&self) -> f64 {
        self.sigma2 / (1.0 + self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianParams {
    pub k: f64,
    pub sigma2: f64,
}

impl RicianParams {
    pub fn new(k: f64, sigma2: f64) -> Result<Self> {
        let p = RicianParams { k, sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("k_q", self.k)?;
        check_power("sigma2_q", self.sigma2)
    }

    pub fn los_power(&self) -> f64 {
        self.sigma2 * self.k / (1.0 + self.k)
    }

    pub fn scatter_power(&self) -> f64 {
        self.sigma2 / (1.0 + self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighParams {
    pub sigma2: f64,
}

impl RayleighParams {
    pub fn new(sigma2: f64) -> Result<Self> {
        let p = RayleighParams { sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_power("sigma2_u", self.sigma2)
    }
}

/// Fading on each hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingScenario {
    pub ris_user: ShadowedRicianParams,
    pub hap_ris: RicianParams,
    pub hap_user: RayleighParams,
}

impl FadingScenario {
    /// Frequent heavy shadowing on RIS→user, severe fading on HAP→RIS.
    pub fn frequent_heavy_shadowing() -> Self {
        FadingScenario {
            ris_user: ShadowedRicianParams {
                k: 0.0071,
                m: 0.739,
                sigma2: 1.0,
            },
            hap_ris: RicianParams { k: 0.1, sigma2: 1.0 },
            hap_user: RayleighParams { sigma2: 1.0 },
        }
    }

    /// Infrequent light shadowing on RIS→user, weak fading on HAP→RIS.
    pub fn infrequent_light_shadowing() -> Self {
        FadingScenario {
            ris_user: ShadowedRicianParams {
                k: 4.0823,
                m: 19.4,
                sigma2: 1.0,
            },
            hap_ris: RicianParams { k: 10.0, sigma2: 1.0 },
            hap_user: RayleighParams { sigma2: 1.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ris_user.validate()?;
        self.hap_ris.validate()?;
        self.hap_user.validate()
    }
}

/// E[|h|^t] for Rayleigh fading: (σ²)^{t/2} Γ(1 + t/2).
pub fn rayleigh_moment(t: f64, p: &RayleighParams) -> Result<f64> {
    check_order("rayleigh_moment", t)?;
    Ok(p.sigma2.powf(t / 2.0) * gamma(1.0 + t / 2.0)?)
}

/// E[|h|^t] for Rician fading:
/// (σ²)^{t/2} Γ(1 + t/2) e^{−K} (K + 1)^{−t/2} ₁F₁(1 + t/2; 1; K).
pub fn rician_moment(t: f64, p: &RicianParams) -> Result<f64> {
    check_order("rician_moment", t)?;
    let half = t / 2.0;
    let scale = (p.sigma2 / (p.k + 1.0)).powf(half);
    Ok(scale * gamma(1.0 + half)? * (-p.k).exp() * kummer_1f1(1.0 + half, 1.0, p.k)?)
}

/// E[|h|^t] for shadowed-Rician fading in (K, m, σ²) form:
/// (σ²/(K+1))^{t/2} (m/(m+K))^m Γ(1 + t/2) ₂F₁(1 + t/2, m; 1; K/(m+K)).
///
/// m = 0 removes the line-of-sight component entirely; the result is then the
/// Rayleigh moment of the scattered power σ²/(1 + K).
pub fn shadowed_rician_moment(t: f64, p: &ShadowedRicianParams) -> Result<f64> {
    check_order("shadowed_rician_moment", t)?;
    if p.m == 0.0 {
        return rayleigh_moment(
            t,
            &RayleighParams {
                sigma2: p.scatter_power(),
            },
        );
    }
    let half = t / 2.0;
    let scale = (p.sigma2 / (p.k + 1.0)).powf(half);
    // (m/(m+K))^m without losing digits for large m
    let shadow = (-p.m * (p.k / p.m).ln_1p()).exp();
    let z = p.k / (p.m + p.k);
    Ok(scale * shadow * gamma(1.0 + half)? * gauss_2f1(1.0 + half, p.m, 1.0, z)?)
}

/// The same moment written with the raw line-of-sight power Ω and scattered
/// power 2b:
/// (2bm/(2bm+Ω))^m (2b)^{t/2} Γ(1 + t/2) ₂F₁(1 + t/2, m; 1; Ω/(2bm+Ω)).
pub fn shadowed_rician_moment_los_scatter(
    t: f64,
    los_power: f64,
    scatter_power: f64,
    m: f64,
) -> Result<f64> {
    check_order("shadowed_rician_moment_los_scatter", t)?;
    if !(m > 0.0) || !(scatter_power > 0.0) || !(los_power >= 0.0) {
        return Err(Error::domain(
            "shadowed_rician_moment_los_scatter",
            "requires m > 0, 2b > 0, Ω ≥ 0",
        ));
    }
    let denom = scatter_power * m + los_power;
    let half = t / 2.0;
    Ok((scatter_power * m / denom).powf(m)
        * scatter_power.powf(half)
        * gamma(1.0 + half)?
        * gauss_2f1(1.0 + half, m, 1.0, los_power / denom)?)
}

/// Rayleigh envelope √(−σ² ln u) for u ∈ (0, 1].
pub fn rayleigh_from_uniform(p: &RayleighParams, u: f64) -> f64 {
    (-p.sigma2 * u.ln()).sqrt()
}

/// Prepared Rayleigh sampler.
#[derive(Debug, Clone, Copy)]
pub struct RayleighEnvelope {
    params: RayleighParams,
}

impl RayleighEnvelope {
    pub fn new(params: RayleighParams) -> Self {
        RayleighEnvelope { params }
    }
}

impl Distribution<f64> for RayleighEnvelope {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = 1.0 - rng.random::<f64>();
        rayleigh_from_uniform(&self.params, u)
    }
}

/// Prepared Rician sampler: |s + X + jY| with s = √Ω and X, Y ~ N(0, b).
#[derive(Debug, Clone, Copy)]
pub struct RicianEnvelope {
    los_amplitude: f64,
    scatter_sd: f64,
}

impl RicianEnvelope {
    pub fn new(params: RicianParams) -> Self {
        RicianEnvelope {
            los_amplitude: params.los_power().sqrt(),
            scatter_sd: (params.scatter_power() / 2.0).sqrt(),
        }
    }
}

impl Distribution<f64> for RicianEnvelope {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        (self.los_amplitude + self.scatter_sd * x).hypot(self.scatter_sd * y)
    }
}

/// Prepared shadowed-Rician sampler: |√P + X + jY| with P ~ Gamma(m, Ω/m)
/// and X, Y ~ N(0, b).
#[derive(Debug, Clone, Copy)]
pub struct ShadowedRicianEnvelope {
    los_power: Option<Gamma<f64>>,
    scatter_sd: f64,
}

impl ShadowedRicianEnvelope {
    pub fn new(params: ShadowedRicianParams) -> Self {
        let omega = params.los_power();
        let los_power = if params.m > 0.0 && omega > 0.0 {
            Gamma::new(params.m, omega / params.m).ok()
        } else {
            None
        };
        ShadowedRicianEnvelope {
            los_power,
            scatter_sd: (params.scatter_power() / 2.0).sqrt(),
        }
    }
}

impl Distribution<f64> for ShadowedRicianEnvelope {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let amplitude = match &self.los_power {
            Some(g) => g.sample(rng).sqrt(),
            None => 0.0,
        };
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        (amplitude + self.scatter_sd * x).hypot(self.scatter_sd * y)
    }
}

pub fn sample_rayleigh<R: Rng + ?Sized>(p: &RayleighParams, rng: &mut R) -> f64 {
    RayleighEnvelope::new(*p).sample(rng)
}

pub fn sample_rician<R: Rng + ?Sized>(p: &RicianParams, rng: &mut R) -> f64 {
    RicianEnvelope::new(*p).sample(rng)
}

pub fn sample_shadowed_rician<R: Rng + ?Sized>(p: &ShadowedRicianParams, rng: &mut R) -> f64 {
    ShadowedRicianEnvelope::new(*p).sample(rng)
}
