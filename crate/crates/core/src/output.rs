// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON serialization of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenario::Formalism;
use crate::sweep::{SweepResult, TrajectoryTable};

pub const SUMMARY_HEADER: &str = "swept_param,swept_value,formalism,F_max_over_F0,P0_min,SL_max,regime,status";
pub const TRAJECTORY_HEADER: &str = "t_over_T,x_over_a,force_over_F0,P0,SL";

/// Shortest `%g`-style rendering with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

/// Summary table as CSV text.
pub fn summary_csv(result: &SweepResult) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            result.swept_param,
            format_sig9(row.swept_value),
            row.formalism,
            opt(row.f_max_over_f0),
            opt(row.p0_min),
            opt(row.sl_max),
            row.regime.as_str(),
            row.status.label().replace(',', ";"),
        );
    }
    out
}

pub fn trajectory_csv(table: &TrajectoryTable) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, x, f, p0, sl) in &table.rows {
        let _ = writeln!(out, "{},{},{},{},{}", format_sig9(*t), format_sig9(*x), format_sig9(*f), opt(*p0), opt(*sl));
    }
    out
}

/// Paths written by [`emit`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub trajectories: Vec<PathBuf>,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Write `sweep.csv`, `sweep.json` and (when present) per-row trajectory
/// files under `dir`, creating it if needed.
pub fn emit(result: &SweepResult, dir: &Path) -> Result<EmittedFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let csv = dir.join("sweep.csv");
    write(&csv, &summary_csv(result))?;
    let json = dir.join("sweep.json");
    let text = serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))?;
    write(&json, &text)?;

    let mut trajectories = Vec::new();
    for table in &result.trajectories {
        let path = dir.join(format!("trajectory_{:03}_{}.csv", table.point_index, table.formalism));
        write(&path, &trajectory_csv(table))?;
        trajectories.push(path);
    }
    Ok(EmittedFiles { csv, json, trajectories })
}

/// One parsed summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub swept_param: String,
    pub swept_value: f64,
    pub formalism: Formalism,
    pub f_max_over_f0: Option<f64>,
    pub p0_min: Option<f64>,
    pub sl_max: Option<f64>,
    pub regime: String,
    pub status: String,
}

/// Parse text produced by [`summary_csv`].
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(SUMMARY_HEADER) {
        return Err(Error::Contract("unexpected summary header".into()));
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| Error::Contract(format!("bad number '{s}'")))
        }
    };
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Contract(format!("expected 8 fields: '{line}'")));
            }
            Ok(SummaryRecord {
                swept_param: f[0].to_string(),
                swept_value: num(f[1])?.unwrap_or(f64::NAN),
                formalism: f[2].parse()?,
                f_max_over_f0: num(f[3])?,
                p0_min: num(f[4])?,
                sl_max: num(f[5])?,
                regime: f[6].to_string(),
                status: f[7].to_string(),
            })
        })
        .collect()
}
