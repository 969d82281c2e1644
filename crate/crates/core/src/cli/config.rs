//! Run configuration: a TOML document with unit-annotated quantities.
//!
//! Every key is optional; missing keys take the reference network setup.
//! Quantities may be bare numbers in SI units or strings with a unit:
//!
//! | kind      | units                              | stored as |
//! |-----------|------------------------------------|-----------|
//! | length    | `m`, `km`                          | m         |
//! | power     | `W`, `mW`, `dBW`, `dBm`            | W         |
//! | density   | `/m2`, `/km2`                      | 1/m²      |
//! | threshold | `dB` (bare numbers are dB too)     | dB        |

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analytic::{ExponentPairing, LinkBudget, LinkMode, SystemModel};
use crate::error::{Error, Result};
use crate::fading::{FadingScenario, RayleighParams, RicianParams, ShadowedRicianParams};
use crate::geometry::NetworkGeometry;
use crate::montecarlo::{SamplingMode, ServingPolicy};

pub const DEFAULT_ELEMENTS: u32 = 16;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Reference network: HAPs at 50 km with density 5e-7/m², RISs at 50 m with
/// density 5e-4/m², exponents (ε_g, ε_q, ε_u) = (2, 3, 3).
pub fn reference_geometry() -> NetworkGeometry {
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

/// E_s = 10 W, N₀ = −92 dBm, so ρ₀ ≈ 1.585e13.
pub fn reference_budget() -> LinkBudget {
    LinkBudget {
        e_s: 10.0,
        n0: dbm_to_watts(-92.0),
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Preset {
    /// Frequent heavy shadowing, severe fading.
    #[serde(rename = "fhs-sf")]
    #[value(name = "fhs-sf")]
    FhsSf,
    /// Infrequent light shadowing, weak fading.
    #[serde(rename = "ils-wf")]
    #[value(name = "ils-wf")]
    IlsWf,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::FhsSf, Preset::IlsWf];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FhsSf => "fhs-sf",
            Preset::IlsWf => "ils-wf",
        }
    }

    pub fn fading(&self) -> FadingScenario {
        match self {
            Preset::FhsSf => FadingScenario::frequent_heavy_shadowing(),
            Preset::IlsWf => FadingScenario::infrequent_light_shadowing(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    RhoThDb,
    LambdaRis,
    HHap,
    #[serde(rename = "L")]
    Elements,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::RhoThDb => "rho_th_db",
            SweepVariable::LambdaRis => "lambda_ris",
            SweepVariable::HHap => "h_hap",
            SweepVariable::Elements => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("sweep.values", "grid is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep.values", "grid values must be finite"));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::invalid("sweep.values", "grid must be strictly monotone"));
        }
        if self.variable == SweepVariable::Elements
            && self.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64)
        {
            return Err(Error::invalid("sweep.values", "element counts must be positive integers"));
        }
        Ok(())
    }

    /// The model at one grid point.
    pub fn apply(&self, model: &SystemModel, value: f64) -> SystemModel {
        self.variable.apply(model, value)
    }
}

impl SweepVariable {
    /// `model` with this variable set to `value`. Threshold sweeps leave the
    /// model unchanged.
    pub fn apply(&self, model: &SystemModel, value: f64) -> SystemModel {
        let mut m = *model;
        match self {
            SweepVariable::RhoThDb => {}
            SweepVariable::LambdaRis => m.geometry.lambda_ris = value,
            SweepVariable::HHap => m.geometry.h_hap = value,
            SweepVariable::Elements => m.l_elements = value as u32,
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Fully resolved configuration of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Preset chosen explicitly; `None` runs figures for both presets and
    /// uses fhs-sf fading for single-model commands.
    pub scenario: Option<Preset>,
    pub model: SystemModel,
    pub sampling: SamplingMode,
    pub serving: ServingPolicy,
    pub n_samples: u64,
    pub seed: u64,
    /// Coverage threshold used when the sweep is not over thresholds.
    pub threshold_db: f64,
    pub sweep: Option<Sweep>,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: None,
            model: SystemModel {
                geometry: reference_geometry(),
                fading: Preset::FhsSf.fading(),
                budget: reference_budget(),
                l_elements: DEFAULT_ELEMENTS,
                mode: LinkMode::RisAssisted,
                pairing: ExponentPairing::PerLink,
            },
            sampling: SamplingMode::Distance,
            serving: ServingPolicy::NearestToUser,
            n_samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            threshold_db: 0.0,
            sweep: None,
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.n_samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample"));
        }
        if !self.threshold_db.is_finite() {
            return Err(Error::invalid("threshold", "must be finite"));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }

    fn base_preset(&self) -> Preset {
        self.scenario.unwrap_or(Preset::FhsSf)
    }

    /// Label for output rows: the preset name, or `custom` when fading
    /// parameters were overridden.
    pub fn preset_label(&self) -> &'static str {
        if self.model.fading == self.base_preset().fading() {
            self.base_preset().name()
        } else {
            "custom"
        }
    }

    pub fn has_custom_fading(&self) -> bool {
        self.model.fading != self.base_preset().fading()
    }

    pub fn threshold_linear(&self) -> f64 {
        db_to_linear(self.threshold_db)
    }

    /// Writes a document that parses back to this exact configuration.
    pub fn to_toml(&self) -> String {
        let raw = RawConfig::from_config(self);
        toml::to_string(&raw).expect("configuration is serializable")
    }
}

/// A number in SI units or a string with a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Length,
    Power,
    Density,
    Decibel,
    Count,
}

fn split_unit(text: &str) -> (&str, &str) {
    let t = text.trim();
    let cut = t
        .char_indices()
        .find(|&(i, c)| {
            let exponent = (c == 'e' || c == 'E')
                && t[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+');
            (c.is_alphabetic() && !exponent) || c == '/'
        })
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    (t[..cut].trim(), t[cut..].trim())
}

impl Quantity {
    fn resolve(&self, field: &str, kind: Kind) -> Result<f64> {
        let text = match self {
            Quantity::Number(v) => return Ok(*v),
            Quantity::Text(t) => t,
        };
        let (number, unit) = split_unit(text);
        let v: f64 = number
            .parse()
            .map_err(|_| Error::invalid(field, format!("cannot read a number from {text:?}")))?;
        let unit_l = unit.to_ascii_lowercase().replace([' ', '^', '²'], "");
        let out = match (kind, unit_l.as_str()) {
            (_, "") => v,
            (Kind::Length, "m") => v,
            (Kind::Length, "km") => v * 1e3,
            (Kind::Power, "w") => v,
            (Kind::Power, "mw") => v * 1e-3,
            (Kind::Power, "dbw") => 10f64.powf(v / 10.0),
            (Kind::Power, "dbm") => dbm_to_watts(v),
            (Kind::Density, "/m2") | (Kind::Density, "perm2") => v,
            (Kind::Density, "/km2") | (Kind::Density, "perkm2") => v * 1e-6,
            (Kind::Decibel, "db") => v,
            _ => {
                return Err(Error::invalid(field, format!("unsupported unit {unit:?} in {text:?}")));
            }
        };
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_hap: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_ris: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_hap: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_ris: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_u: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    #[serde(skip_serializing_if = "Option::is_none")]
    e_s: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n0: Option<Quantity>,
}

/// Overrides on top of the preset fading.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFading {
    #[serde(skip_serializing_if = "Option::is_none")]
    k_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma2_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma2_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma2_u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: SweepVariable,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Quantity>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Preset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    link_mode: Option<LinkMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairing: Option<ExponentPairing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    serving: Option<ServingPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<RawGeometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<RawBudget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fading: Option<RawFading>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

fn resolve(q: &Option<Quantity>, field: &str, kind: Kind, default: f64) -> Result<f64> {
    q.as_ref().map_or(Ok(default), |q| q.resolve(field, kind))
}

impl RawConfig {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            scenario: self.scenario,
            ..RunConfig::default()
        };
        cfg.model.fading = cfg.base_preset().fading();
        if let Some(l) = self.elements {
            cfg.model.l_elements = l;
        }
        if let Some(m) = self.link_mode {
            cfg.model.mode = m;
        }
        if let Some(p) = self.pairing {
            cfg.model.pairing = p;
        }
        if let Some(s) = self.sampling {
            cfg.sampling = s;
        }
        if let Some(s) = self.serving {
            cfg.serving = s;
        }
        if let Some(n) = self.samples {
            cfg.n_samples = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.threshold_db = resolve(&self.threshold, "threshold", Kind::Decibel, 0.0)?;

        let g = self.geometry.unwrap_or_default();
        let geo = &mut cfg.model.geometry;
        geo.lambda_hap = resolve(&g.lambda_hap, "geometry.lambda_hap", Kind::Density, geo.lambda_hap)?;
        geo.lambda_ris = resolve(&g.lambda_ris, "geometry.lambda_ris", Kind::Density, geo.lambda_ris)?;
        geo.h_hap = resolve(&g.h_hap, "geometry.h_hap", Kind::Length, geo.h_hap)?;
        geo.h_ris = resolve(&g.h_ris, "geometry.h_ris", Kind::Length, geo.h_ris)?;
        geo.eps_g = g.eps_g.unwrap_or(geo.eps_g);
        geo.eps_q = g.eps_q.unwrap_or(geo.eps_q);
        geo.eps_u = g.eps_u.unwrap_or(geo.eps_u);

        let b = self.budget.unwrap_or_default();
        let budget = &mut cfg.model.budget;
        budget.e_s = resolve(&b.e_s, "budget.e_s", Kind::Power, budget.e_s)?;
        budget.n0 = resolve(&b.n0, "budget.n0", Kind::Power, budget.n0)?;

        let f = self.fading.unwrap_or_default();
        let fading = &mut cfg.model.fading;
        fading.ris_user = ShadowedRicianParams {
            k: f.k_g.unwrap_or(fading.ris_user.k),
            m: f.m_g.unwrap_or(fading.ris_user.m),
            sigma2: f.sigma2_g.unwrap_or(fading.ris_user.sigma2),
        };
        fading.hap_ris = RicianParams {
            k: f.k_q.unwrap_or(fading.hap_ris.k),
            sigma2: f.sigma2_q.unwrap_or(fading.hap_ris.sigma2),
        };
        fading.hap_user = RayleighParams {
            sigma2: f.sigma2_u.unwrap_or(fading.hap_user.sigma2),
        };

        if let Some(s) = self.sweep {
            cfg.sweep = Some(resolve_sweep(s)?);
        }
        let o = self.output.unwrap_or_default();
        cfg.output_path = o.path;
        if let Some(f) = o.format {
            cfg.output_format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &RunConfig) -> RawConfig {
        let geo = &cfg.model.geometry;
        let b = &cfg.model.budget;
        let fad = &cfg.model.fading;
        let fading = if cfg.has_custom_fading() {
            Some(RawFading {
                k_g: Some(fad.ris_user.k),
                m_g: Some(fad.ris_user.m),
                sigma2_g: Some(fad.ris_user.sigma2),
                k_q: Some(fad.hap_ris.k),
                sigma2_q: Some(fad.hap_ris.sigma2),
                sigma2_u: Some(fad.hap_user.sigma2),
            })
        } else {
            None
        };
        RawConfig {
            scenario: cfg.scenario,
            elements: Some(cfg.model.l_elements),
            link_mode: Some(cfg.model.mode),
            pairing: Some(cfg.model.pairing),
            sampling: Some(cfg.sampling),
            serving: Some(cfg.serving),
            samples: Some(cfg.n_samples),
            seed: Some(cfg.seed),
            threshold: Some(Quantity::Number(cfg.threshold_db)),
            geometry: Some(RawGeometry {
                lambda_hap: Some(Quantity::Number(geo.lambda_hap)),
                lambda_ris: Some(Quantity::Number(geo.lambda_ris)),
                h_hap: Some(Quantity::Number(geo.h_hap)),
                h_ris: Some(Quantity::Number(geo.h_ris)),
                eps_g: Some(geo.eps_g),
                eps_q: Some(geo.eps_q),
                eps_u: Some(geo.eps_u),
            }),
            budget: Some(RawBudget {
                e_s: Some(Quantity::Number(b.e_s)),
                n0: Some(Quantity::Number(b.n0)),
            }),
            fading,
            sweep: cfg.sweep.as_ref().map(|s| RawSweep {
                variable: s.variable,
                values: Some(s.values.iter().map(|&v| Quantity::Number(v)).collect()),
                start: None,
                stop: None,
                step: None,
            }),
            output: Some(RawOutput {
                path: cfg.output_path.clone(),
                format: Some(cfg.output_format),
            }),
        }
    }
}

fn sweep_kind(v: SweepVariable) -> Kind {
    match v {
        SweepVariable::RhoThDb => Kind::Decibel,
        SweepVariable::LambdaRis => Kind::Density,
        SweepVariable::HHap => Kind::Length,
        SweepVariable::Elements => Kind::Count,
    }
}

fn resolve_sweep(raw: RawSweep) -> Result<Sweep> {
    let kind = sweep_kind(raw.variable);
    let values = match (&raw.values, &raw.start, &raw.stop, &raw.step) {
        (Some(values), None, None, None) => values
            .iter()
            .map(|q| q.resolve("sweep.values", kind))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(start), Some(stop), Some(step)) => {
            let start = start.resolve("sweep.start", kind)?;
            let stop = stop.resolve("sweep.stop", kind)?;
            let step = step.resolve("sweep.step", kind)?;
            linear_grid(start, stop, step)?
        }
        _ => {
            return Err(Error::invalid(
                "sweep",
                "give either `values` or all of `start`, `stop`, `step`",
            ))
        }
    };
    let sweep = Sweep {
        variable: raw.variable,
        values,
    };
    sweep.validate()?;
    Ok(sweep)
}

/// start, start + step, … up to stop (inclusive, with a 1e-9 step slack).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step != 0.0 && step.is_finite() && (stop - start) / step >= 0.0) {
        return Err(Error::invalid("sweep.step", "step must move from start towards stop"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(Error::invalid("sweep.step", "grid has more than a million points"));
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Parses a configuration document. An empty document yields
/// [`RunConfig::default`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    raw.into_config()
}
