//! Command-line front-end.
//!
//! Exit codes: 0 on success, 1 when `validate` finds a failing check or a
//! computation fails, 2 on usage or configuration errors.

pub mod config;
pub mod figures;
pub mod table;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytic::{ExponentPairing, LinkMode};
use crate::error::{Error, Result};
use crate::montecarlo::SamplingMode;
use config::{parse_config, OutputFormat, Preset, RunConfig};
use figures::{FigureId, FigureOptions};
use table::Row;

#[derive(Debug, Parser)]
#[command(name = "hapris", version, about = "Coverage and capacity of RIS-assisted HAP downlinks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form mean, variance, Gamma fit, coverage and capacity.
    Analytic,
    /// Monte Carlo estimates next to the closed forms.
    Simulate,
    /// Reproduce one figure as a table.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
    },
    /// Run the cross-check suite and report pass/fail per check.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Distance,
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    PerLink,
    Swapped,
}

#[derive(Debug, Default, clap::Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Fading preset; replaces the fading of the configuration file.
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<Preset>,
    /// Number of reflecting elements L.
    #[arg(long, global = true)]
    pub elements: Option<u32>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Draw nearest-neighbour distances directly or realize the point fields.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Which path-loss exponent goes with which hop distance.
    #[arg(long, global = true, value_enum)]
    pub pairing: Option<PairingArg>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Table format (`validate` always writes JSON).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Drop the RIS path and keep only the direct HAP-user link.
    #[arg(long, global = true)]
    pub direct_only: bool,
}

impl Overrides {
    /// Configuration file (or defaults) with the command-line flags applied.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                parse_config(&text).map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                    other => other,
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(p) = self.scenario {
            // a scenario flag replaces the fading of the file
            cfg.scenario = Some(p);
            cfg.model.fading = p.fading();
        }
        if let Some(l) = self.elements {
            cfg.model.l_elements = l;
        }
        if let Some(n) = self.samples {
            cfg.n_samples = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.mode {
            cfg.sampling = match m {
                ModeArg::Distance => SamplingMode::Distance,
                ModeArg::Field => SamplingMode::Field,
            };
        }
        if let Some(p) = self.pairing {
            cfg.model.pairing = match p {
                PairingArg::PerLink => ExponentPairing::PerLink,
                PairingArg::Swapped => ExponentPairing::Swapped,
            };
        }
        if let Some(o) = &self.output {
            cfg.output_path = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.output_format = f;
        }
        if self.direct_only {
            cfg.model.mode = LinkMode::DirectOnly;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output_path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(rows: &[Row], cfg: &RunConfig) -> Result<()> {
    let mut out = sink(cfg)?;
    match cfg.output_format {
        OutputFormat::Csv => table::write_csv(rows, &mut out)?,
        OutputFormat::Json => table::write_json(rows, &mut out)?,
    }
    out.flush().map_err(|e| Error::Output(e.to_string()))
}

fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::InvalidParameter { .. })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> ExitCode {
    let cfg = match cli.overrides.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Analytic => figures::run_analytic(&cfg).and_then(|rows| emit(&rows, &cfg)).map(|_| true),
        Command::Simulate => figures::run_simulate(&cfg).and_then(|rows| emit(&rows, &cfg)).map(|_| true),
        Command::Figure { id } => {
            let opts = FigureOptions {
                elements: cli.overrides.elements,
                direct_only: cli.overrides.direct_only,
            };
            figures::run_figure(*id, &cfg, &opts)
                .and_then(|rows| emit(&rows, &cfg))
                .map(|_| true)
        }
        Command::Validate => validate::run_validate(&cfg).and_then(|report| {
            let mut out = sink(&cfg)?;
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Error::Output(e.to_string()))?;
            writeln!(out).map_err(|e| Error::Output(e.to_string()))?;
            out.flush().map_err(|e| Error::Output(e.to_string()))?;
            for c in &report.checks {
                eprintln!("{:<13} {}", format!("{:?}", c.status).to_uppercase(), c.name);
            }
            Ok(report.passed)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}

pub fn main() -> ExitCode {
    run(&Cli::parse())
}
