//! Output rows shared by every table-producing command.
//!
//! CSV columns, in order:
//!
//! | column          | content                                                     |
//! |-----------------|-------------------------------------------------------------|
//! | figure          | `fig2`, `fig3`, `fig4a`, `fig4b`, `analytic` or `simulate`  |
//! | preset          | `fhs-sf`, `ils-wf` or `custom`                              |
//! | link_mode       | `ris-assisted` or `direct-only`                             |
//! | elements        | number of reflecting elements L                             |
//! | sampling        | `distance` or `field`                                       |
//! | pairing         | `per-link` or `swapped`                                     |
//! | seed            | Monte Carlo seed                                            |
//! | n_samples       | Monte Carlo sample count (empty when no simulation ran)     |
//! | x_variable      | `rho_th_db`, `lambda_ris`, `h_hap`, `L`, `gain` or `none`   |
//! | x_value         | grid value in SI units (dB for thresholds)                  |
//! | bin_width       | histogram bin width (`fig2` only)                           |
//! | metric          | `pdf`, `coverage`, `capacity`, `mean_abs_a`, `var_abs_a`, `alpha`, `beta` |
//! | analytic        | closed-form value                                           |
//! | analytic_method | `closed-form` or `quadrature` for capacities                |
//! | mc              | Monte Carlo estimate                                        |
//! | mc_std_error    | its standard error                                          |
//!
//! Empty cells mean "not applicable". JSON output is an array of objects with
//! the same keys in the same order, with `null` for empty cells.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub figure: String,
    pub preset: String,
    pub link_mode: String,
    pub elements: u32,
    pub sampling: String,
    pub pairing: String,
    pub seed: u64,
    pub n_samples: Option<u64>,
    pub x_variable: String,
    pub x_value: Option<f64>,
    pub bin_width: Option<f64>,
    pub metric: String,
    pub analytic: Option<f64>,
    pub analytic_method: Option<String>,
    pub mc: Option<f64>,
    pub mc_std_error: Option<f64>,
}

pub fn write_csv(rows: &[Row], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Output(format!("writing CSV: {e}")))?;
    }
    w.flush().map_err(|e| Error::Output(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn write_json(rows: &[Row], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)
        .map_err(|e| Error::Output(format!("writing JSON: {e}")))?;
    writeln!(out).map_err(|e| Error::Output(format!("writing JSON: {e}")))?;
    Ok(())
}
