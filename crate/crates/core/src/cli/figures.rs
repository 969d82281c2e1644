//! Table producers: figure sweeps and the single-model `analytic` and
//! `simulate` commands.
//!
//! Default figure grids:
//!
//! - `fig2`: 100 bins over mean ± 6 standard deviations of the fitted Gamma
//!   (clipped at 0), L ∈ {16, 64} plus the direct link alone,
//! - `fig3`: ρ_th from −10 to 30 dB in 1 dB steps, L ∈ {4, 16} plus the
//!   direct link alone,
//! - `fig4a`: λ_RIS from 1e-6 to 1e-2 /m², four points per decade,
//!   L ∈ {4, 16, 64},
//! - `fig4b`: H_HAP from 20 to 50 km in 2.5 km steps, L ∈ {4, 16, 64}.
//!
//! A `[sweep]` over the figure's own variable replaces its grid. Unless a
//! scenario is chosen, every figure covers both presets.

use serde::{Deserialize, Serialize};

use super::config::{db_to_linear, linear_grid, Preset, RunConfig, SweepVariable};
use super::table::Row;
use crate::analytic::{
    channel_pdf, coverage_probability, ergodic_capacity, gamma_approx, LinkMode, SystemModel,
};
use crate::error::{Error, Result};
use crate::montecarlo::{MetricEstimate, Simulator};

pub const FIG2_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
}

impl FigureId {
    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
        }
    }
}

/// Command-line narrowing of a figure's curve set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    /// Replace the figure's element counts with this one.
    pub elements: Option<u32>,
    /// Only the direct-link curve.
    pub direct_only: bool,
}

/// One curve: a labelled model.
#[derive(Debug, Clone, Copy)]
struct Curve {
    preset: &'static str,
    model: SystemModel,
}

fn preset_fadings(cfg: &RunConfig) -> Vec<(&'static str, crate::fading::FadingScenario)> {
    if cfg.has_custom_fading() {
        vec![("custom", cfg.model.fading)]
    } else if let Some(p) = cfg.scenario {
        vec![(p.name(), p.fading())]
    } else {
        Preset::ALL.iter().map(|p| (p.name(), p.fading())).collect()
    }
}

fn curves(cfg: &RunConfig, opts: &FigureOptions, elements: &[u32], with_direct: bool) -> Vec<Curve> {
    let mut out = Vec::new();
    for (preset, fading) in preset_fadings(cfg) {
        let base = SystemModel { fading, ..cfg.model };
        if !opts.direct_only {
            let ls: Vec<u32> = opts.elements.map_or_else(|| elements.to_vec(), |l| vec![l]);
            for l in ls {
                out.push(Curve {
                    preset,
                    model: SystemModel {
                        l_elements: l,
                        mode: LinkMode::RisAssisted,
                        ..base
                    },
                });
            }
        }
        if with_direct || opts.direct_only {
            out.push(Curve {
                preset,
                model: SystemModel {
                    mode: LinkMode::DirectOnly,
                    ..base
                },
            });
        }
    }
    out
}

struct RowContext<'a> {
    figure: &'a str,
    cfg: &'a RunConfig,
    preset: &'a str,
    model: &'a SystemModel,
    n_samples: Option<u64>,
    x_variable: &'a str,
}

impl RowContext<'_> {
    fn row(
        &self,
        x_value: Option<f64>,
        bin_width: Option<f64>,
        metric: &str,
        analytic: Option<f64>,
        method: Option<&str>,
        mc: Option<(f64, Option<f64>)>,
    ) -> Row {
        let (elements, link_mode) = match self.model.mode {
            LinkMode::RisAssisted => (self.model.l_elements, "ris-assisted"),
            LinkMode::DirectOnly => (0, "direct-only"),
        };
        Row {
            figure: self.figure.to_string(),
            preset: self.preset.to_string(),
            link_mode: link_mode.to_string(),
            elements,
            sampling: self.cfg.sampling.as_str().to_string(),
            pairing: match self.model.pairing {
                crate::analytic::ExponentPairing::PerLink => "per-link",
                crate::analytic::ExponentPairing::Swapped => "swapped",
            }
            .to_string(),
            seed: self.cfg.seed,
            n_samples: self.n_samples,
            x_variable: self.x_variable.to_string(),
            x_value,
            bin_width,
            metric: metric.to_string(),
            analytic,
            analytic_method: method.map(str::to_string),
            mc: mc.map(|m| m.0),
            mc_std_error: mc.and_then(|m| m.1),
        }
    }
}

fn estimate(e: &MetricEstimate) -> Option<(f64, Option<f64>)> {
    Some((e.value, Some(e.std_error)))
}

fn simulator(cfg: &RunConfig, model: &SystemModel) -> Result<Simulator> {
    Simulator::with_policy(model, cfg.sampling, cfg.serving)
}

fn grid_for(cfg: &RunConfig, variable: SweepVariable, default: impl FnOnce() -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    match &cfg.sweep {
        Some(s) if s.variable == variable => Ok(s.values.clone()),
        Some(s) => Err(Error::invalid(
            "sweep.variable",
            format!("this figure sweeps {}, not {}", variable.as_str(), s.variable.as_str()),
        )),
        None => default(),
    }
}

pub fn fig3_thresholds_db() -> Vec<f64> {
    (-10..=30).map(f64::from).collect()
}

pub fn fig4a_lambda_ris() -> Vec<f64> {
    (0..=16).map(|k| 10f64.powf(-6.0 + k as f64 / 4.0)).collect()
}

pub fn fig4b_h_hap() -> Vec<f64> {
    linear_grid(20_000.0, 50_000.0, 2_500.0).expect("static grid")
}

pub fn run_figure(id: FigureId, cfg: &RunConfig, opts: &FigureOptions) -> Result<Vec<Row>> {
    cfg.validate()?;
    match id {
        FigureId::Fig2 => fig2(cfg, opts),
        FigureId::Fig3 => fig3(cfg, opts),
        FigureId::Fig4a => {
            let grid = grid_for(cfg, SweepVariable::LambdaRis, || Ok(fig4a_lambda_ris()))?;
            capacity_figure(id, cfg, opts, SweepVariable::LambdaRis, &grid)
        }
        FigureId::Fig4b => {
            let grid = grid_for(cfg, SweepVariable::HHap, || Ok(fig4b_h_hap()))?;
            capacity_figure(id, cfg, opts, SweepVariable::HHap, &grid)
        }
    }
}

fn fig2(cfg: &RunConfig, opts: &FigureOptions) -> Result<Vec<Row>> {
    if cfg.sweep.is_some() {
        return Err(Error::invalid("sweep", "fig2 has no sweep variable"));
    }
    let mut rows = Vec::new();
    for c in curves(cfg, opts, &[16, 64], true) {
        let g = gamma_approx(&c.model)?;
        let sd = g.var_a.sqrt();
        let lo = (g.mean_a - 6.0 * sd).max(0.0);
        let hi = g.mean_a + 6.0 * sd;
        let width = (hi - lo) / FIG2_BINS as f64;
        let edges: Vec<f64> = (0..=FIG2_BINS).map(|i| lo + i as f64 * width).collect();
        let hist = simulator(cfg, &c.model)?.gain_histogram(cfg.n_samples, &edges, cfg.seed)?;
        let ctx = RowContext {
            figure: "fig2",
            cfg,
            preset: c.preset,
            model: &c.model,
            n_samples: Some(cfg.n_samples),
            x_variable: "gain",
        };
        let n = cfg.n_samples as f64;
        for (i, &density) in hist.density.iter().enumerate() {
            let w = edges[i + 1] - edges[i];
            let centre = 0.5 * (edges[i] + edges[i + 1]);
            let p = density * w;
            let se = (p * (1.0 - p) / n).sqrt() / w;
            rows.push(ctx.row(
                Some(centre),
                Some(w),
                "pdf",
                Some(channel_pdf(&g, centre)?),
                None,
                Some((density, Some(se))),
            ));
        }
    }
    Ok(rows)
}

fn fig3(cfg: &RunConfig, opts: &FigureOptions) -> Result<Vec<Row>> {
    let grid = grid_for(cfg, SweepVariable::RhoThDb, || Ok(fig3_thresholds_db()))?;
    let linear: Vec<f64> = grid.iter().map(|&db| db_to_linear(db)).collect();
    let mut rows = Vec::new();
    for c in curves(cfg, opts, &[4, 16], true) {
        let g = gamma_approx(&c.model)?;
        let rho0 = c.model.rho0();
        let mc = simulator(cfg, &c.model)?.coverage(&linear, cfg.n_samples, cfg.seed)?;
        let ctx = RowContext {
            figure: "fig3",
            cfg,
            preset: c.preset,
            model: &c.model,
            n_samples: Some(cfg.n_samples),
            x_variable: "rho_th_db",
        };
        for ((&db, &th), est) in grid.iter().zip(&linear).zip(&mc) {
            rows.push(ctx.row(
                Some(db),
                None,
                "coverage",
                Some(coverage_probability(&g, rho0, th)?),
                None,
                estimate(est),
            ));
        }
    }
    Ok(rows)
}

fn capacity_figure(
    id: FigureId,
    cfg: &RunConfig,
    opts: &FigureOptions,
    variable: SweepVariable,
    grid: &[f64],
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for c in curves(cfg, opts, &[4, 16, 64], false) {
        for &x in grid {
            let model = variable.apply(&c.model, x);
            let cap = ergodic_capacity(&gamma_approx(&model)?, model.rho0())?;
            let mc = simulator(cfg, &model)?.capacity(cfg.n_samples, cfg.seed)?;
            let ctx = RowContext {
                figure: id.as_str(),
                cfg,
                preset: c.preset,
                model: &model,
                n_samples: Some(cfg.n_samples),
                x_variable: variable.as_str(),
            };
            rows.push(ctx.row(
                Some(x),
                None,
                "capacity",
                Some(cap.bits),
                Some(cap.method.as_str()),
                estimate(&mc),
            ));
        }
    }
    Ok(rows)
}

/// Grid points of a single-model command: the sweep, or the model itself.
fn points(cfg: &RunConfig) -> Vec<(Option<f64>, SystemModel, f64)> {
    match &cfg.sweep {
        None => vec![(None, cfg.model, cfg.threshold_db)],
        Some(s) => s
            .values
            .iter()
            .map(|&x| {
                let th = if s.variable == SweepVariable::RhoThDb { x } else { cfg.threshold_db };
                (Some(x), s.apply(&cfg.model, x), th)
            })
            .collect(),
    }
}

fn x_variable(cfg: &RunConfig) -> &'static str {
    cfg.sweep.as_ref().map_or("none", |s| s.variable.as_str())
}

/// Closed-form quantities of the configured model (over the sweep, if any).
pub fn run_analytic(cfg: &RunConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (x, model, th_db) in points(cfg) {
        let g = gamma_approx(&model)?;
        let rho0 = model.rho0();
        let cap = ergodic_capacity(&g, rho0)?;
        let ctx = RowContext {
            figure: "analytic",
            cfg,
            preset: cfg.preset_label(),
            model: &model,
            n_samples: None,
            x_variable: x_variable(cfg),
        };
        rows.push(ctx.row(x, None, "mean_abs_a", Some(g.mean_a), None, None));
        rows.push(ctx.row(x, None, "var_abs_a", Some(g.var_a), None, None));
        rows.push(ctx.row(x, None, "alpha", Some(g.alpha), None, None));
        rows.push(ctx.row(x, None, "beta", Some(g.beta), None, None));
        let pc = coverage_probability(&g, rho0, db_to_linear(th_db))?;
        rows.push(ctx.row(x, None, "coverage", Some(pc), None, None));
        rows.push(ctx.row(x, None, "capacity", Some(cap.bits), Some(cap.method.as_str()), None));
    }
    Ok(rows)
}

/// Monte Carlo estimates next to the closed forms of the configured model.
pub fn run_simulate(cfg: &RunConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (x, model, th_db) in points(cfg) {
        let g = gamma_approx(&model)?;
        let rho0 = model.rho0();
        let th = db_to_linear(th_db);
        let sim = simulator(cfg, &model)?;
        let (n, seed) = (cfg.n_samples, cfg.seed);
        let moments = sim.gain_moments(n, seed)?;
        let coverage = sim.coverage(&[th], n, seed)?;
        let capacity = sim.capacity(n, seed)?;
        let cap = ergodic_capacity(&g, rho0)?;
        let ctx = RowContext {
            figure: "simulate",
            cfg,
            preset: cfg.preset_label(),
            model: &model,
            n_samples: Some(n),
            x_variable: x_variable(cfg),
        };
        rows.push(ctx.row(x, None, "mean_abs_a", Some(g.mean_a), None, estimate(&moments.mean)));
        rows.push(ctx.row(x, None, "var_abs_a", Some(g.var_a), None, Some((moments.variance, None))));
        rows.push(ctx.row(
            x,
            None,
            "coverage",
            Some(coverage_probability(&g, rho0, th)?),
            None,
            estimate(&coverage[0]),
        ));
        rows.push(ctx.row(
            x,
            None,
            "capacity",
            Some(cap.bits),
            Some(cap.method.as_str()),
            estimate(&capacity),
        ));
    }
    Ok(rows)
}
