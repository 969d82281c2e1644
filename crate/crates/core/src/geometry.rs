//! Placement of platforms and surfaces as homogeneous planar Poisson processes.
//!
//! The horizontal distance ω from an arbitrary point to the nearest point of
//! a process with density λ has density 2λπω·exp(−λπω²). With a link height
//! H the slant range is R = √(ω² + H²), and the inverse-distance moments
//! E[R^{−tε/2}] have a closed form in the upper incomplete gamma function.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::upper_incomplete_gamma_scaled;

/// Densities in points/m², heights in m, dimensionless path-loss exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkGeometry {
    pub lambda_hap: f64,
    pub lambda_ris: f64,
    pub h_hap: f64,
    pub h_ris: f64,
    pub eps_g: f64,
    pub eps_q: f64,
    pub eps_u: f64,
}

impl NetworkGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("lambda_hap", self.lambda_hap)?;
        positive("lambda_ris", self.lambda_ris)?;
        positive("h_hap", self.h_hap)?;
        positive("h_ris", self.h_ris)?;
        if self.h_ris >= self.h_hap {
            return Err(Error::invalid(
                "h_ris",
                format!("must be below h_hap ({} m ≥ {} m)", self.h_ris, self.h_hap),
            ));
        }
        for (name, eps) in [("eps_g", self.eps_g), ("eps_q", self.eps_q), ("eps_u", self.eps_u)] {
            if !(eps >= 2.0) || !eps.is_finite() {
                return Err(Error::invalid(name, format!("path-loss exponent {eps} must be ≥ 2")));
            }
        }
        Ok(())
    }

    pub fn link(&self, link: LinkKind) -> LinkGeometry {
        let (lambda, eps) = match link {
            LinkKind::HapRis => (self.lambda_hap, self.eps_q),
            LinkKind::RisUser => (self.lambda_ris, self.eps_g),
            LinkKind::HapUser => (self.lambda_hap, self.eps_u),
        };
        LinkGeometry {
            lambda,
            height: link_height(self, link),
            eps,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    HapRis,
    RisUser,
    HapUser,
}

impl LinkKind {
    pub const ALL: [LinkKind; 3] = [LinkKind::HapRis, LinkKind::RisUser, LinkKind::HapUser];
}

/// The (λ, H, ε) triple governing one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub lambda: f64,
    pub height: f64,
    pub eps: f64,
}

impl LinkGeometry {
    /// E[R^{−tε/2}] for this link.
    pub fn moment(&self, t: f64) -> Result<f64> {
        distance_moment(t, self.eps, self.lambda, self.height)
    }

    pub fn slant_range(&self, omega: f64) -> f64 {
        omega.hypot(self.height)
    }
}

pub fn link_height(geom: &NetworkGeometry, link: LinkKind) -> f64 {
    match link {
        LinkKind::HapRis => geom.h_hap - geom.h_ris,
        LinkKind::RisUser => geom.h_ris,
        LinkKind::HapUser => geom.h_hap,
    }
}

/// Density of the nearest-neighbour horizontal distance.
pub fn nearest_distance_pdf(lambda: f64, w: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("nearest_distance_pdf", "density must be positive"));
    }
    if !(w >= 0.0) {
        return Err(Error::domain("nearest_distance_pdf", format!("distance {w} < 0")));
    }
    Ok(2.0 * lambda * PI * w * (-lambda * PI * w * w).exp())
}

pub fn nearest_distance_cdf(lambda: f64, w: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        -(-lambda * PI * w * w).exp_m1()
    }
}

/// Inverse CDF: maps u ∈ (0, 1] to √(−ln u / (λπ)).
pub fn nearest_distance_from_uniform(lambda: f64, u: f64) -> f64 {
    (-u.ln() / (lambda * PI)).sqrt()
}

pub fn sample_nearest_distance<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], keeping the logarithm finite
    let u = 1.0 - rng.random::<f64>();
    nearest_distance_from_uniform(lambda, u)
}

/// E[R^{−tε/2}] with R = √(ω² + h²) and ω nearest-neighbour distributed:
/// (πλ)^{tε/4} · e^{πh²λ} · Γ(1 − tε/4, πh²λ).
///
/// The product e^x Γ(a, x) is evaluated as one scaled quantity because e^x
/// alone overflows for platform altitudes (πh²λ ≈ 3919 at 50 km, 5e-7/m²).
pub fn distance_moment(t: f64, eps: f64, lambda: f64, h: f64) -> Result<f64> {
    const NAME: &str = "distance_moment";
    if !(t >= 0.0) {
        return Err(Error::domain(NAME, format!("order t = {t} must be ≥ 0")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(NAME, format!("exponent {eps} must be positive")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(NAME, format!("density {lambda} must be positive")));
    }
    if !(h >= 0.0) {
        return Err(Error::domain(NAME, format!("height {h} must be ≥ 0")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let k = t * eps / 4.0;
    if h == 0.0 && k >= 1.0 {
        return Err(Error::Divergence {
            function: NAME,
            message: format!("tε = {} ≥ 4 at zero height", t * eps),
        });
    }
    let x = PI * h * h * lambda;
    let scaled = upper_incomplete_gamma_scaled(1.0 - k, x)?;
    Ok((k * (PI * lambda).ln()).exp() * scaled)
}
