//! Closed-form characterization of the end-to-end channel.
//!
//! The combined response is
//!
//! ```text
//! |A| = Σₗ |qₗ gₗ| · R_q^{−ε/2} R_g^{−ε'/2}  +  |u| · R_u^{−ε_u/2}
//! ```
//!
//! Its mean and variance follow from independence of the fading and distance
//! factors, and |A| is then approximated by a Gamma(α, β) law matched on those
//! two moments. Coverage and ergodic capacity are functionals of that law.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{rayleigh_moment, rician_moment, shadowed_rician_moment, FadingScenario};
use crate::geometry::{LinkGeometry, LinkKind, NetworkGeometry};
use crate::quad::{integrate_pieces, QuadSpec};
use crate::specfun::{
    cos_pi, digamma, gauss_2f1, generalized_pfq_series, kummer_1f1, ln_gamma,
    lower_incomplete_gamma_regularized, sin_pi, upper_incomplete_gamma_regularized,
    AccuracySpec,
};

/// Minimum distance of α from the integers for the closed-form capacity.
pub const CAPACITY_POLE_GUARD: f64 = 1e-3;

/// Largest estimated relative rounding error accepted from the closed-form
/// capacity before it defers to quadrature.
pub const CAPACITY_CONDITION_LIMIT: f64 = 1e-4;

/// Absolute tolerance (bits/s/Hz) of the quadrature capacity.
pub const CAPACITY_QUAD_ABS_TOL: f64 = 1e-8;

/// Transmit power and noise power in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub e_s: f64,
    pub n0: f64,
}

impl LinkBudget {
    pub fn new(e_s: f64, n0: f64) -> Result<Self> {
        let b = LinkBudget { e_s, n0 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_s > 0.0 && self.e_s.is_finite()) {
            return Err(Error::invalid("e_s", "transmit power must be positive"));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::invalid("n0", "noise power must be positive"));
        }
        Ok(())
    }

    /// Transmit SNR ρ₀ = E_s / N₀ (linear).
    pub fn rho0(&self) -> f64 {
        self.e_s / self.n0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkMode {
    RisAssisted,
    DirectOnly,
}

/// Which path-loss exponent is applied to which distance on the RIS path.
///
/// `PerLink` raises each hop distance to its own exponent:
/// R_q^{ε_q/2} R_g^{ε_g/2}. `Swapped` uses R_q^{ε_g/2} R_g^{ε_q/2}, the
/// pairing written in the maximum-SNR expression; it is kept selectable
/// because the two readings give very different link budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentPairing {
    #[default]
    PerLink,
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    pub geometry: NetworkGeometry,
    pub fading: FadingScenario,
    pub budget: LinkBudget,
    pub l_elements: u32,
    pub mode: LinkMode,
    pub pairing: ExponentPairing,
}

impl SystemModel {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.fading.validate()?;
        self.budget.validate()?;
        if self.l_elements == 0 {
            return Err(Error::invalid("elements", "need at least one reflecting element"));
        }
        Ok(())
    }

    /// Geometry of the HAP→RIS and RIS→user hops with the exponents the
    /// pairing assigns to them.
    pub fn ris_hops(&self) -> (LinkGeometry, LinkGeometry) {
        let mut hap_ris = self.geometry.link(LinkKind::HapRis);
        let mut ris_user = self.geometry.link(LinkKind::RisUser);
        if self.pairing == ExponentPairing::Swapped {
            std::mem::swap(&mut hap_ris.eps, &mut ris_user.eps);
        }
        (hap_ris, ris_user)
    }

    pub fn direct_hop(&self) -> LinkGeometry {
        self.geometry.link(LinkKind::HapUser)
    }

    pub fn rho0(&self) -> f64 {
        self.budget.rho0()
    }
}

/// How the RIS-path fading prefactors are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentRoute {
    /// Product of the per-hop envelope moments.
    Composed,
    /// The printed mean/variance constants, L(π/4)σ_gσ_q e^{−K_q}(…)₁F₁₂F₁,
    /// which lack the ((1+K_g)(1+K_q))^{−1/2} factors of the composed route.
    /// Distance factors are identical in both routes.
    LiteralDisplay,
}

/// First and second moments of the two additive parts of |A|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMoments {
    /// E of the RIS-path term (zero in direct-only mode).
    pub ris_mean: f64,
    /// E of the squared RIS-path term.
    pub ris_second: f64,
    pub direct_mean: f64,
    pub direct_second: f64,
}

impl ChannelMoments {
    pub fn mean(&self) -> f64 {
        self.ris_mean + self.direct_mean
    }

    pub fn variance(&self) -> f64 {
        (self.ris_second - self.ris_mean * self.ris_mean)
            + (self.direct_second - self.direct_mean * self.direct_mean)
    }
}

pub fn channel_moments(model: &SystemModel, route: MomentRoute) -> Result<ChannelMoments> {
    model.validate()?;
    let direct = model.direct_hop();
    let u = &model.fading.hap_user;
    let direct_mean = rayleigh_moment(1.0, u)? * direct.moment(1.0)?;
    let direct_second = rayleigh_moment(2.0, u)? * direct.moment(2.0)?;

    if model.mode == LinkMode::DirectOnly {
        return Ok(ChannelMoments {
            ris_mean: 0.0,
            ris_second: 0.0,
            direct_mean,
            direct_second,
        });
    }

    let l = model.l_elements as f64;
    let (hap_ris, ris_user) = model.ris_hops();
    let dist_1 = hap_ris.moment(1.0)? * ris_user.moment(1.0)?;
    let dist_2 = hap_ris.moment(2.0)? * ris_user.moment(2.0)?;

    let q = &model.fading.hap_ris;
    let g = &model.fading.ris_user;
    let (pair_mean, pair_second) = match route {
        MomentRoute::Composed => (
            rician_moment(1.0, q)? * shadowed_rician_moment(1.0, g)?,
            rician_moment(2.0, q)? * shadowed_rician_moment(2.0, g)?,
        ),
        MomentRoute::LiteralDisplay => {
            let shadow = (-g.m * (g.k / g.m).ln_1p()).exp();
            let shadow = if g.m == 0.0 { 1.0 } else { shadow };
            let core = (-q.k).exp()
                * shadow
                * kummer_1f1(1.5, 1.0, q.k)?
                * gauss_2f1(1.5, g.m, 1.0, g.k / (g.m + g.k))?;
            // the cross term of the printed variance carries no σ factors
            let mean = PI / 4.0 * g.sigma2.sqrt() * q.sigma2.sqrt() * core;
            let cross = PI * PI / 16.0 * core * core;
            let second = g.sigma2 * q.sigma2;
            let ris_second = (l * second + (l * l - l) * cross) * dist_2;
            return Ok(ChannelMoments {
                ris_mean: l * mean * dist_1,
                ris_second,
                direct_mean,
                direct_second,
            });
        }
    };
    let ris_mean = l * pair_mean * dist_1;
    let ris_second = (l * pair_second + (l * l - l) * pair_mean * pair_mean) * dist_2;
    Ok(ChannelMoments {
        ris_mean,
        ris_second,
        direct_mean,
        direct_second,
    })
}

/// E[|A|] composed from the per-hop moments.
pub fn mean_abs_a(model: &SystemModel) -> Result<f64> {
    channel_moments(model, MomentRoute::Composed).map(|m| m.mean())
}

/// Var[|A|] composed from the per-hop moments.
pub fn var_abs_a(model: &SystemModel) -> Result<f64> {
    let v = channel_moments(model, MomentRoute::Composed)?.variance();
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain("var_abs_a", format!("non-positive variance {v}")))
    }
}

/// Gamma law matched to the mean and variance of |A|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaChannelApprox {
    pub alpha: f64,
    pub beta: f64,
    pub mean_a: f64,
    pub var_a: f64,
}

impl GammaChannelApprox {
    pub fn from_moments(mean: f64, var: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::domain("gamma_approx", format!("mean {mean} must be positive")));
        }
        if !(var > 0.0 && var.is_finite()) {
            return Err(Error::domain("gamma_approx", format!("variance {var} must be positive")));
        }
        Ok(GammaChannelApprox {
            alpha: mean * mean / var,
            beta: var / mean,
            mean_a: mean,
            var_a: var,
        })
    }

    /// Shape/scale pair without moment bookkeeping.
    pub fn from_shape_scale(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::domain("gamma_approx", "shape and scale must be positive"));
        }
        Ok(GammaChannelApprox {
            alpha,
            beta,
            mean_a: alpha * beta,
            var_a: alpha * beta * beta,
        })
    }
}

pub fn gamma_approx(model: &SystemModel) -> Result<GammaChannelApprox> {
    gamma_approx_with(model, MomentRoute::Composed)
}

pub fn gamma_approx_with(model: &SystemModel, route: MomentRoute) -> Result<GammaChannelApprox> {
    let m = channel_moments(model, route)?;
    GammaChannelApprox::from_moments(m.mean(), m.variance())
}

/// Gamma density of |A|.
pub fn channel_pdf(g: &GammaChannelApprox, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("channel_pdf", format!("x = {x} must be ≥ 0")));
    }
    if x == 0.0 {
        return Ok(match g.alpha {
            a if a < 1.0 => f64::INFINITY,
            1.0 => 1.0 / g.beta,
            _ => 0.0,
        });
    }
    let ln_f = (g.alpha - 1.0) * x.ln() - x / g.beta - g.alpha * g.beta.ln() - ln_gamma(g.alpha)?;
    Ok(ln_f.exp())
}

/// Gamma CDF of |A|.
pub fn channel_cdf(g: &GammaChannelApprox, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    lower_incomplete_gamma_regularized(g.alpha, x / g.beta)
}

/// Density of ρ = ρ₀|A|² implied by the Gamma law of |A|:
/// f(x) = x^{(α−2)/2} exp(−√(x/(β²ρ₀))) / (2 β^α Γ(α) ρ₀^{α/2}).
///
/// At x = 0 the density is +∞ for α < 2 (an integrable singularity).
pub fn snr_pdf(g: &GammaChannelApprox, rho0: f64, x: f64) -> Result<f64> {
    if !(rho0 > 0.0) {
        return Err(Error::domain("snr_pdf", "transmit SNR must be positive"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain("snr_pdf", format!("x = {x} must be ≥ 0")));
    }
    let ln_norm = -LN_2 - g.alpha * g.beta.ln() - ln_gamma(g.alpha)? - 0.5 * g.alpha * rho0.ln();
    if x == 0.0 {
        return Ok(if g.alpha < 2.0 {
            f64::INFINITY
        } else if g.alpha == 2.0 {
            ln_norm.exp()
        } else {
            0.0
        });
    }
    let ln_f = ln_norm + 0.5 * (g.alpha - 2.0) * x.ln() - (x / rho0).sqrt() / g.beta;
    Ok(ln_f.exp())
}

fn check_snr(function: &'static str, rho0: f64, rho_th: f64) -> Result<()> {
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(Error::domain(function, format!("transmit SNR {rho0} must be positive")));
    }
    if !(rho_th >= 0.0) {
        return Err(Error::domain(function, format!("threshold {rho_th} must be ≥ 0")));
    }
    Ok(())
}

/// P(ρ > ρ_th) = 1 − γ(α, √(ρ_th/(ρ₀β²)))/Γ(α).
pub fn coverage_probability(g: &GammaChannelApprox, rho0: f64, rho_th: f64) -> Result<f64> {
    check_snr("coverage_probability", rho0, rho_th)?;
    let x = (rho_th / rho0).sqrt() / g.beta;
    upper_incomplete_gamma_regularized(g.alpha, x)
}

/// Threshold ρ_th at which the coverage probability equals `target`.
pub fn coverage_threshold(g: &GammaChannelApprox, rho0: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain("coverage_threshold", "target must lie in (0, 1)"));
    }
    check_snr("coverage_threshold", rho0, 0.0)?;
    // Q(α, x) is decreasing in x
    let mut lo = 0.0;
    let mut hi = g.alpha + 50.0 * g.alpha.sqrt() + 50.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if upper_incomplete_gamma_regularized(g.alpha, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(rho0 * (g.beta * x).powi(2))
}

struct Piece {
    value: f64,
    error: f64,
}

/// prefactor · pFq with a rounding-error estimate for the product.
fn scaled_series(
    log_magnitude: f64,
    sign: f64,
    numerator: &[f64],
    denominator: &[f64],
    z: f64,
    acc: &AccuracySpec,
) -> Result<Piece> {
    let series = generalized_pfq_series(numerator, denominator, z, acc)?;
    let scale = log_magnitude.exp();
    // cancellation inside the series, plus the relative error that exp()
    // inherits from the absolute error of its argument
    let error = f64::EPSILON
        * scale
        * (2.0 * series.abs_sum + log_magnitude.abs() * series.value.abs());
    Ok(Piece {
        value: sign * scale * series.value,
        error,
    })
}

/// Ergodic capacity E[log₂(1 + ρ₀|A|²)] under the Gamma law, from the
/// residue expansion in y = 1/(β²ρ₀):
///
/// ```text
/// C·ln2 = π y^{α/2} csc(πα/2) / (α Γ(α)) · ₁F₂(α/2; 1/2, 1+α/2; −y/4)
///       + y / ((α−1)(α−2)) · ₂F₃(1, 1; 2, 3/2−α/2, 2−α/2; −y/4)
///       + 2ψ(α) − ln y
///       − π y^{(1+α)/2} sec(πα/2) / ((1+α) Γ(α)) · ₁F₂((1+α)/2; 3/2, (3+α)/2; −y/4)
/// ```
///
/// The terms have poles at integer α that cancel only in the sum, and for
/// large y they cancel heavily. Both situations are reported as errors
/// ([`Error::PoleProximity`], [`Error::IllConditioned`]) so the caller can use
/// [`ergodic_capacity_quadrature`]; [`ergodic_capacity`] does this.
pub fn ergodic_capacity_closed_form(g: &GammaChannelApprox, rho0: f64) -> Result<f64> {
    ergodic_capacity_closed_form_with(g, rho0, &ClosedFormGuards::default())
}

/// Limits under which the closed-form capacity is attempted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormGuards {
    /// Minimum distance of α from the integers.
    pub pole_guard: f64,
    /// Largest accepted estimated relative rounding error. The estimate
    /// bounds the rounding error of every term, so it is pessimistic; the
    /// realized error is typically one to two orders of magnitude smaller.
    pub condition_limit: f64,
}

impl Default for ClosedFormGuards {
    fn default() -> Self {
        ClosedFormGuards {
            pole_guard: CAPACITY_POLE_GUARD,
            condition_limit: CAPACITY_CONDITION_LIMIT,
        }
    }
}

/// [`ergodic_capacity_closed_form`] with explicit guards.
pub fn ergodic_capacity_closed_form_with(
    g: &GammaChannelApprox,
    rho0: f64,
    guards: &ClosedFormGuards,
) -> Result<f64> {
    check_snr("ergodic_capacity_closed_form", rho0, 0.0)?;
    let alpha = g.alpha;
    if (alpha - alpha.round()).abs() < guards.pole_guard {
        return Err(Error::PoleProximity {
            alpha,
            guard: guards.pole_guard,
        });
    }
    let acc = AccuracySpec {
        rel_tol: 1e-17,
        max_terms: 100_000,
    };
    // a series that cannot be summed at this argument is a conditioning failure
    let conditioned = |e: Error| match e {
        Error::NonConvergence { .. } => Error::IllConditioned {
            estimate: f64::INFINITY,
            limit: guards.condition_limit,
        },
        other => other,
    };
    let ln_y = -2.0 * g.beta.ln() - rho0.ln();
    let y = ln_y.exp();
    let z = -0.25 * y;
    let lg = ln_gamma(alpha)?;

    let csc = 1.0 / sin_pi(alpha / 2.0);
    let t1 = scaled_series(
        0.5 * alpha * ln_y - lg + (PI / alpha * csc.abs()).ln(),
        csc.signum(),
        &[alpha / 2.0],
        &[0.5, 1.0 + alpha / 2.0],
        z,
        &acc,
    )
    .map_err(conditioned)?;

    let c2 = y / ((alpha - 1.0) * (alpha - 2.0));
    let t2 = scaled_series(
        c2.abs().ln(),
        c2.signum(),
        &[1.0, 1.0],
        &[2.0, 1.5 - alpha / 2.0, 2.0 - alpha / 2.0],
        z,
        &acc,
    )
    .map_err(conditioned)?;

    let psi = digamma(alpha)?;
    let t3 = Piece {
        value: 2.0 * psi - ln_y,
        error: 4.0 * f64::EPSILON * (2.0 * psi.abs() + ln_y.abs()),
    };

    let sec = 1.0 / cos_pi(alpha / 2.0);
    let t4 = scaled_series(
        0.5 * (1.0 + alpha) * ln_y - lg + (PI / (1.0 + alpha) * sec.abs()).ln(),
        -sec.signum(),
        &[0.5 * (1.0 + alpha)],
        &[1.5, 0.5 * (3.0 + alpha)],
        z,
        &acc,
    )
    .map_err(conditioned)?;

    let total = t1.value + t2.value + t3.value + t4.value;
    let error = t1.error + t2.error + t3.error + t4.error;
    let estimate = error / total.abs();
    if !(total > 0.0) || !total.is_finite() || !(estimate <= guards.condition_limit) {
        return Err(Error::IllConditioned {
            estimate: if estimate.is_nan() { f64::INFINITY } else { estimate },
            limit: guards.condition_limit,
        });
    }
    Ok(total / LN_2)
}

/// Ergodic capacity by adaptive Gauss–Kronrod integration against the Gamma
/// density, with absolute tolerance [`CAPACITY_QUAD_ABS_TOL`]. The variable is
/// s = x/β and the last piece runs to ∞ via s = a + u/(1 − u).
pub fn ergodic_capacity_quadrature(g: &GammaChannelApprox, rho0: f64) -> Result<f64> {
    check_snr("ergodic_capacity_quadrature", rho0, 0.0)?;
    let alpha = g.alpha;
    let lg = ln_gamma(alpha)?;
    // ρ₀β², kept in log form
    let snr_scale = (2.0 * g.beta.ln() + rho0.ln()).exp();
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let density = ((alpha - 1.0) * s.ln() - s - lg).exp();
        (s * s * snr_scale).ln_1p() / LN_2 * density
    };
    let spread = 10.0 * alpha.sqrt() + 10.0;
    let mut breaks = vec![0.0];
    for b in [alpha - spread, alpha, alpha + spread] {
        if b > *breaks.last().expect("non-empty") {
            breaks.push(b);
        }
    }
    let spec = QuadSpec {
        abs_tol: CAPACITY_QUAD_ABS_TOL,
        rel_tol: 1e-11,
        max_intervals: 4_000,
    };
    Ok(integrate_pieces(integrand, &breaks, &spec)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMethod {
    ClosedForm,
    Quadrature,
}

impl CapacityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CapacityMethod::ClosedForm => "closed-form",
            CapacityMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityValue {
    pub bits: f64,
    pub method: CapacityMethod,
}

/// Closed form where it is usable, quadrature otherwise.
pub fn ergodic_capacity(g: &GammaChannelApprox, rho0: f64) -> Result<CapacityValue> {
    match ergodic_capacity_closed_form(g, rho0) {
        Ok(bits) => Ok(CapacityValue {
            bits,
            method: CapacityMethod::ClosedForm,
        }),
        Err(Error::PoleProximity { .. }) | Err(Error::IllConditioned { .. }) => {
            Ok(CapacityValue {
                bits: ergodic_capacity_quadrature(g, rho0)?,
                method: CapacityMethod::Quadrature,
            })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn model(fading: FadingScenario, l: u32, mode: LinkMode) -> SystemModel {
        SystemModel {
            geometry: NetworkGeometry {
                lambda_hap: 5e-7,
                lambda_ris: 5e-4,
                h_hap: 50_000.0,
                h_ris: 50.0,
                eps_g: 2.0,
                eps_q: 3.0,
                eps_u: 3.0,
            },
            fading,
            budget: LinkBudget::new(10.0, 10f64.powf(-12.2)).unwrap(),
            l_elements: l,
            mode,
            pairing: ExponentPairing::PerLink,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn direct_only_mean_is_single_term() {
        let m = model(FadingScenario::frequent_heavy_shadowing(), 16, LinkMode::DirectOnly);
        let expected = gamma(1.5).unwrap() * m.direct_hop().moment(1.0).unwrap();
        assert!(rel(mean_abs_a(&m).unwrap(), expected) < 1e-15);
        let d = m.direct_hop();
        let var = d.moment(2.0).unwrap() - gamma(1.5).unwrap().powi(2) * d.moment(1.0).unwrap().powi(2);
        assert!(rel(var_abs_a(&m).unwrap(), var) < 1e-12);
    }

    #[test]
    fn ris_term_is_linear_in_elements() {
        let f = FadingScenario::infrequent_light_shadowing();
        let a = channel_moments(&model(f, 16, LinkMode::RisAssisted), MomentRoute::Composed).unwrap();
        let b = channel_moments(&model(f, 32, LinkMode::RisAssisted), MomentRoute::Composed).unwrap();
        assert!(rel(b.ris_mean, 2.0 * a.ris_mean) < 1e-15);
        assert_eq!(a.direct_mean, b.direct_mean);
    }

    #[test]
    fn single_element_has_no_cross_term() {
        let m = model(FadingScenario::frequent_heavy_shadowing(), 1, LinkMode::RisAssisted);
        let c = channel_moments(&m, MomentRoute::Composed).unwrap();
        let (q, g) = m.ris_hops();
        let expected = q.moment(2.0).unwrap() * g.moment(2.0).unwrap();
        assert!(rel(c.ris_second, expected) < 1e-14);
    }

    #[test]
    fn literal_route_differs_by_rician_factors() {
        let m = model(FadingScenario::infrequent_light_shadowing(), 16, LinkMode::RisAssisted);
        let composed = channel_moments(&m, MomentRoute::Composed).unwrap();
        let literal = channel_moments(&m, MomentRoute::LiteralDisplay).unwrap();
        let k = ((1.0 + 4.0823) * (1.0 + 10.0f64)).sqrt();
        assert!(rel(literal.ris_mean, composed.ris_mean * k) < 1e-12);
    }

    #[test]
    fn gamma_moment_matching() {
        let g = GammaChannelApprox::from_moments(2.0, 1.0).unwrap();
        assert_eq!((g.alpha, g.beta), (4.0, 0.5));
        assert!(rel(g.alpha * g.beta, 2.0) < 1e-15);
        assert!(rel(g.alpha * g.beta * g.beta, 1.0) < 1e-15);
        assert!(GammaChannelApprox::from_moments(1.0, 0.0).is_err());
    }

    #[test]
    fn pdf_special_cases() {
        let g = GammaChannelApprox::from_shape_scale(1.0, 2.0).unwrap();
        for x in [0.0, 0.5, 3.0] {
            assert!(rel(channel_pdf(&g, x).unwrap(), 0.5 * (-x / 2.0f64).exp()) < 1e-14);
        }
        assert!(channel_pdf(&g, -1.0).is_err());
        let g = GammaChannelApprox::from_shape_scale(2.0, 1.0).unwrap();
        assert!(rel(snr_pdf(&g, 1.0, 1.0).unwrap(), 0.5 * (-1f64).exp()) < 1e-14);
        let g = GammaChannelApprox::from_shape_scale(1.5, 1.0).unwrap();
        assert_eq!(snr_pdf(&g, 1.0, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn coverage_limits() {
        let g = GammaChannelApprox::from_shape_scale(5.7, 1.7e-8).unwrap();
        let rho0 = 1.585e13;
        assert_eq!(coverage_probability(&g, rho0, 0.0).unwrap(), 1.0);
        let e = GammaChannelApprox::from_shape_scale(1.0, 0.3).unwrap();
        let th = 2.0;
        let expected = (-(th / (4.0 * 0.09f64)).sqrt()).exp();
        assert!(rel(coverage_probability(&e, 4.0, th).unwrap(), expected) < 1e-13);
        assert!(coverage_probability(&g, rho0, -1.0).is_err());
        let th = coverage_threshold(&g, rho0, 0.5).unwrap();
        assert!((coverage_probability(&g, rho0, th).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_capacity_guards() {
        let g = GammaChannelApprox::from_shape_scale(3.0005, 0.2).unwrap();
        assert!(matches!(
            ergodic_capacity_closed_form(&g, 100.0),
            Err(Error::PoleProximity { .. })
        ));
        let v = ergodic_capacity(&g, 100.0).unwrap();
        assert_eq!(v.method, CapacityMethod::Quadrature);
        // y ≈ 600 with α ≈ 17: the terms cancel by ~20 orders of magnitude
        let g = GammaChannelApprox::from_shape_scale(17.03, 1.0296e-8).unwrap();
        assert!(matches!(
            ergodic_capacity_closed_form(&g, 1.585e13),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn closed_form_matches_quadrature_spot() {
        let g = GammaChannelApprox::from_shape_scale(2.5, 1.0).unwrap();
        let cf = ergodic_capacity_closed_form(&g, 1.0).unwrap();
        let q = ergodic_capacity_quadrature(&g, 1.0).unwrap();
        assert!(rel(cf, q) < 1e-9, "{cf} vs {q}");
    }
}
