//! Seeded Monte Carlo realization of the end-to-end channel.
//!
//! The receiver co-phases both paths, so |A| is the sum of envelopes:
//!
//! ```text
//! |A| = Σₗ |qₗ||gₗ| / (R_q^{ε/2} R_g^{ε'/2}) + |u| / R_u^{ε_u/2},   ρ = ρ₀|A|²
//! ```
//!
//! Reproducibility: samples are split into chunks of [`CHUNK_SIZE`]. Chunk
//! `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, chunks are
//! evaluated in parallel and their partial results are combined in chunk
//! order. Results therefore depend only on (model, mode, n, seed), never on
//! the number of worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{LinkMode, SystemModel};
use crate::error::{Error, Result};
use crate::fading::{RayleighEnvelope, RicianEnvelope, ShadowedRicianEnvelope};
use crate::geometry::{sample_nearest_distance, LinkGeometry};

/// Realizations per independently seeded chunk.
pub const CHUNK_SIZE: u64 = 4096;

/// Probability that a simulated field disc contains no point at all.
pub const FIELD_EMPTY_PROBABILITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Independent nearest-neighbour distances per link, as in the analysis.
    #[default]
    Distance,
    /// Explicit planar point fields around the user.
    Field,
}

impl SamplingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplingMode::Distance => "distance",
            SamplingMode::Field => "field",
        }
    }
}

/// Which HAP feeds the RIS in field mode. The direct path always comes from
/// the HAP nearest to the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ServingPolicy {
    #[default]
    NearestToUser,
    NearestToRis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub omega_g: f64,
    pub omega_q: f64,
    pub omega_u: f64,
    pub r_g: f64,
    pub r_q: f64,
    pub r_u: f64,
    pub gain_a: f64,
    pub snr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Density-normalized histogram of |A|.
#[derive(Debug, Clone, PartialEq)]
pub struct GainHistogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    /// Samples outside [edges₀, edges_last].
    pub outside: u64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Sample mean and variance of |A|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMoments {
    pub mean: MetricEstimate,
    pub variance: f64,
}

/// Everything needed to draw realizations of one model.
#[derive(Debug, Clone)]
pub struct Simulator {
    mode: SamplingMode,
    policy: ServingPolicy,
    link_mode: LinkMode,
    l_elements: u32,
    rho0: f64,
    hap_ris: LinkGeometry,
    ris_user: LinkGeometry,
    hap_user: LinkGeometry,
    q: RicianEnvelope,
    g: ShadowedRicianEnvelope,
    u: RayleighEnvelope,
    field: Option<FieldDiscs>,
}

#[derive(Debug, Clone, Copy)]
struct FieldDiscs {
    ris_radius: f64,
    ris_count: Poisson<f64>,
    hap_radius: f64,
    hap_count: Poisson<f64>,
}

/// Radius at which a disc of a density-λ field is empty with the target
/// probability: exp(−λπr²) = p.
fn covering_radius(lambda: f64) -> f64 {
    (-FIELD_EMPTY_PROBABILITY.ln() / (lambda * PI)).sqrt()
}

fn poisson(mean: f64) -> Result<Poisson<f64>> {
    Poisson::new(mean).map_err(|e| Error::invalid("field", format!("Poisson mean {mean}: {e}")))
}

impl Simulator {
    pub fn new(model: &SystemModel, mode: SamplingMode) -> Result<Self> {
        Self::with_policy(model, mode, ServingPolicy::default())
    }

    pub fn with_policy(model: &SystemModel, mode: SamplingMode, policy: ServingPolicy) -> Result<Self> {
        model.validate()?;
        let (hap_ris, ris_user) = model.ris_hops();
        let hap_user = model.direct_hop();
        let field = match mode {
            SamplingMode::Distance => None,
            SamplingMode::Field => {
                let ris_radius = covering_radius(ris_user.lambda);
                // the HAP disc must also cover the neighbourhood of any RIS
                let hap_radius = covering_radius(hap_user.lambda) + ris_radius;
                Some(FieldDiscs {
                    ris_radius,
                    ris_count: poisson(ris_user.lambda * PI * ris_radius * ris_radius)?,
                    hap_radius,
                    hap_count: poisson(hap_user.lambda * PI * hap_radius * hap_radius)?,
                })
            }
        };
        Ok(Simulator {
            mode,
            policy,
            link_mode: model.mode,
            l_elements: model.l_elements,
            rho0: model.rho0(),
            hap_ris,
            ris_user,
            hap_user,
            q: RicianEnvelope::new(model.fading.hap_ris),
            g: ShadowedRicianEnvelope::new(model.fading.ris_user),
            u: RayleighEnvelope::new(model.fading.hap_user),
            field,
        })
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    /// Draws one realization.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let (omega_g, omega_q, omega_u) = match &self.field {
            None => (
                sample_nearest_distance(self.ris_user.lambda, rng),
                sample_nearest_distance(self.hap_ris.lambda, rng),
                sample_nearest_distance(self.hap_user.lambda, rng),
            ),
            Some(discs) => self.field_distances(discs, rng),
        };
        self.combine(omega_g, omega_q, omega_u, rng)
    }

    /// Draws the fading for given horizontal distances and forms |A| and ρ.
    pub fn combine<R: Rng + ?Sized>(
        &self,
        omega_g: f64,
        omega_q: f64,
        omega_u: f64,
        rng: &mut R,
    ) -> ChannelRealization {
        let r_g = self.ris_user.slant_range(omega_g);
        let r_q = self.hap_ris.slant_range(omega_q);
        let r_u = self.hap_user.slant_range(omega_u);
        let mut gain_a = 0.0;
        if self.link_mode == LinkMode::RisAssisted {
            let mut cascade = 0.0;
            for _ in 0..self.l_elements {
                cascade += self.q.sample(rng) * self.g.sample(rng);
            }
            gain_a += cascade * r_q.powf(-0.5 * self.hap_ris.eps) * r_g.powf(-0.5 * self.ris_user.eps);
        }
        gain_a += self.u.sample(rng) * r_u.powf(-0.5 * self.hap_user.eps);
        ChannelRealization {
            omega_g,
            omega_q,
            omega_u,
            r_g,
            r_q,
            r_u,
            gain_a,
            snr: self.rho0 * gain_a * gain_a,
        }
    }

    fn field_distances<R: Rng + ?Sized>(&self, discs: &FieldDiscs, rng: &mut R) -> (f64, f64, f64) {
        // the user sits at the origin; an empty disc (probability ≤ 1e-9)
        // is redrawn
        let ris = loop {
            if let Some(p) = nearest_point(discs.ris_radius, &discs.ris_count, [0.0, 0.0], rng) {
                break p;
            }
        };
        let haps = loop {
            let haps = uniform_disc_points(discs.hap_radius, &discs.hap_count, rng);
            if !haps.is_empty() {
                break haps;
            }
        };
        let user_hap = closest(&haps, [0.0, 0.0]);
        let ris_hap = match self.policy {
            ServingPolicy::NearestToUser => user_hap,
            ServingPolicy::NearestToRis => closest(&haps, ris),
        };
        let omega_g = ris[0].hypot(ris[1]);
        let omega_q = (ris_hap[0] - ris[0]).hypot(ris_hap[1] - ris[1]);
        let omega_u = user_hap[0].hypot(user_hap[1]);
        (omega_g, omega_q, omega_u)
    }
}

fn uniform_disc_points<R: Rng + ?Sized>(radius: f64, count: &Poisson<f64>, rng: &mut R) -> Vec<[f64; 2]> {
    let n = count.sample(rng) as usize;
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

fn nearest_point<R: Rng + ?Sized>(
    radius: f64,
    count: &Poisson<f64>,
    to: [f64; 2],
    rng: &mut R,
) -> Option<[f64; 2]> {
    let points = uniform_disc_points(radius, count, rng);
    if points.is_empty() {
        None
    } else {
        Some(closest(&points, to))
    }
}

fn closest(points: &[[f64; 2]], to: [f64; 2]) -> [f64; 2] {
    let d2 = |p: &[f64; 2]| (p[0] - to[0]).powi(2) + (p[1] - to[1]).powi(2);
    *points
        .iter()
        .min_by(|a, b| d2(a).total_cmp(&d2(b)))
        .expect("non-empty point set")
}

/// Draws one realization with a caller-supplied generator.
pub fn simulate_channel_gain<R: Rng + ?Sized>(
    model: &SystemModel,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<ChannelRealization> {
    Ok(Simulator::new(model, mode)?.realize(rng))
}

/// Runs `f` on every chunk with its own generator and returns the partial
/// results in chunk order.
pub fn map_chunks<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            f(&mut rng, count)
        })
        .collect()
}

fn check_count(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("n_samples", "need at least one sample"))
    } else {
        Ok(())
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n / n,
            m2: self.m2 + other.m2 + d * d * self.n * other.n / n,
        }
    }

    fn variance(&self) -> f64 {
        if self.n > 1.0 {
            self.m2 / (self.n - 1.0)
        } else {
            0.0
        }
    }
}

fn fold_moments(sim: &Simulator, n: u64, seed: u64, value: impl Fn(&ChannelRealization) -> f64 + Sync) -> Moments {
    map_chunks(n, seed, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(value(&sim.realize(rng)));
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge)
}

impl Simulator {
    /// Fraction of realizations with ρ > ρ_th for each threshold, from one
    /// shared sample set.
    pub fn coverage(&self, thresholds: &[f64], n: u64, seed: u64) -> Result<Vec<MetricEstimate>> {
        check_count(n)?;
        let counts = map_chunks(n, seed, |rng, count| {
            let mut hits = vec![0u64; thresholds.len()];
            for _ in 0..count {
                let snr = self.realize(rng).snr;
                for (h, &th) in hits.iter_mut().zip(thresholds) {
                    *h += u64::from(snr > th);
                }
            }
            hits
        })
        .into_iter()
        .fold(vec![0u64; thresholds.len()], |mut acc, hits| {
            acc.iter_mut().zip(hits).for_each(|(a, h)| *a += h);
            acc
        });
        let nf = n as f64;
        Ok(counts
            .into_iter()
            .map(|c| {
                let p = c as f64 / nf;
                MetricEstimate {
                    value: p,
                    std_error: (p * (1.0 - p) / nf).sqrt(),
                    n_samples: n,
                    seed,
                }
            })
            .collect())
    }

    /// Sample mean of log₂(1 + ρ).
    pub fn capacity(&self, n: u64, seed: u64) -> Result<MetricEstimate> {
        check_count(n)?;
        let m = fold_moments(self, n, seed, |r| r.snr.ln_1p() / std::f64::consts::LN_2);
        Ok(MetricEstimate {
            value: m.mean,
            std_error: (m.variance() / m.n).sqrt(),
            n_samples: n,
            seed,
        })
    }

    /// Sample mean (with standard error) and sample variance of |A|.
    pub fn gain_moments(&self, n: u64, seed: u64) -> Result<GainMoments> {
        check_count(n)?;
        let m = fold_moments(self, n, seed, |r| r.gain_a);
        Ok(GainMoments {
            mean: MetricEstimate {
                value: m.mean,
                std_error: (m.variance() / m.n).sqrt(),
                n_samples: n,
                seed,
            },
            variance: m.variance(),
        })
    }

    /// All |A| samples in generation order.
    pub fn gains(&self, n: u64, seed: u64) -> Result<Vec<f64>> {
        check_count(n)?;
        let chunks = map_chunks(n, seed, |rng, count| {
            (0..count).map(|_| self.realize(rng).gain_a).collect::<Vec<_>>()
        });
        Ok(chunks.concat())
    }

    /// Histogram of |A| over `bin_edges`; bins are half-open except the
    /// last, which includes its right edge.
    pub fn gain_histogram(&self, n: u64, bin_edges: &[f64], seed: u64) -> Result<GainHistogram> {
        check_count(n)?;
        if bin_edges.len() < 2 {
            return Err(Error::invalid("bin_edges", "need at least two edges"));
        }
        if bin_edges.iter().any(|e| !e.is_finite()) || bin_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("bin_edges", "edges must be finite and strictly increasing"));
        }
        let bins = bin_edges.len() - 1;
        let last = bin_edges[bins];
        let counts = map_chunks(n, seed, |rng, count| {
            let mut c = vec![0u64; bins + 1];
            for _ in 0..count {
                let x = self.realize(rng).gain_a;
                let slot = if x < bin_edges[0] || x > last {
                    bins
                } else if x == last {
                    bins - 1
                } else {
                    bin_edges.partition_point(|&e| e <= x) - 1
                };
                c[slot] += 1;
            }
            c
        })
        .into_iter()
        .fold(vec![0u64; bins + 1], |mut acc, c| {
            acc.iter_mut().zip(c).for_each(|(a, h)| *a += h);
            acc
        });
        let nf = n as f64;
        let density = (0..bins)
            .map(|i| counts[i] as f64 / (nf * (bin_edges[i + 1] - bin_edges[i])))
            .collect();
        Ok(GainHistogram {
            edges: bin_edges.to_vec(),
            density,
            outside: counts[bins],
            n_samples: n,
            seed,
        })
    }
}

/// [`Simulator::coverage`] for the default serving policy.
pub fn estimate_coverage(
    model: &SystemModel,
    mode: SamplingMode,
    thresholds: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<MetricEstimate>> {
    Simulator::new(model, mode)?.coverage(thresholds, n, seed)
}

/// [`Simulator::capacity`] for the default serving policy.
pub fn estimate_capacity(model: &SystemModel, mode: SamplingMode, n: u64, seed: u64) -> Result<MetricEstimate> {
    Simulator::new(model, mode)?.capacity(n, seed)
}

/// [`Simulator::gain_moments`] for the default serving policy.
pub fn estimate_gain_moments(model: &SystemModel, mode: SamplingMode, n: u64, seed: u64) -> Result<GainMoments> {
    Simulator::new(model, mode)?.gain_moments(n, seed)
}

/// [`Simulator::gains`] for the default serving policy.
pub fn sample_gains(model: &SystemModel, mode: SamplingMode, n: u64, seed: u64) -> Result<Vec<f64>> {
    Simulator::new(model, mode)?.gains(n, seed)
}

/// [`Simulator::gain_histogram`] for the default serving policy.
pub fn estimate_gain_histogram(
    model: &SystemModel,
    mode: SamplingMode,
    n: u64,
    bin_edges: &[f64],
    seed: u64,
) -> Result<GainHistogram> {
    Simulator::new(model, mode)?.gain_histogram(n, bin_edges, seed)
}
