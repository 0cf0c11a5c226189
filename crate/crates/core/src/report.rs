//! Check reports and artifact serialization (JSON records, CSV tables).

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::estimator::MomentTable;
use crate::grid::FieldSnapshot;
use crate::kernel::KernelTable;

/// Result of one numerical inequality/identity verification.
///
/// `pass` implies `violations == 0` and `stability_ratio <= stability_cap`;
/// fitted constants are reported, never asserted against reference values
/// (only their existence and stability are checked).
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub parameter_grid: String,
    pub fitted_constant: f64,
    pub stability_ratio: f64,
    pub stability_cap: f64,
    pub violations: u64,
    pub pass: bool,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn finalize(mut self) -> Self {
        self.pass = self.violations == 0
            && self.stability_ratio <= self.stability_cap
            && self.fitted_constant.is_finite();
        self
    }
}

/// One line per check: name, fitted constant, stability ratio, PASS/FAIL.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{:<26} C = {:<12.6} stability = {:<10.6} {}\n",
            r.check_name,
            r.fitted_constant,
            r.stability_ratio,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// CSV columns: x, p, dp.
pub fn write_kernel_csv<W: Write>(
    out: &mut W,
    table: &KernelTable,
    gradient: &KernelTable,
    stride: usize,
) -> Result<()> {
    writeln!(out, "x,p,dp")?;
    let stride = stride.max(1);
    for i in (0..table.abscissae.len()).step_by(stride) {
        writeln!(
            out,
            "{},{},{}",
            fmt(table.abscissae[i]),
            fmt(table.values[i]),
            fmt(gradient.values[i])
        )?;
    }
    Ok(())
}

/// CSV columns: axis, k, lag, moment, stderr.
pub fn write_moment_csv<W: Write>(out: &mut W, tables: &[&MomentTable]) -> Result<()> {
    writeln!(out, "axis,k,lag,moment,stderr")?;
    for t in tables {
        let axis = match t.axis {
            crate::estimator::Axis::Space => "space",
            crate::estimator::Axis::Time => "time",
        };
        for ((lag, m), se) in t.lags.iter().zip(&t.moments).zip(&t.stderrs) {
            writeln!(out, "{axis},{},{},{},{}", t.k, fmt(*lag), fmt(*m), fmt(*se))?;
        }
    }
    Ok(())
}

/// Long-format snapshot CSV: path, t, x, u.
pub fn write_snapshots_csv<W: Write>(
    out: &mut W,
    paths: &[Vec<FieldSnapshot>],
    grid: &crate::grid::SpaceGrid,
    stride: usize,
) -> Result<()> {
    writeln!(out, "path,t,x,u")?;
    let stride = stride.max(1);
    for (p, snaps) in paths.iter().enumerate() {
        for snap in snaps {
            for m in (0..snap.values.len()).step_by(stride) {
                writeln!(
                    out,
                    "{p},{},{},{}",
                    fmt(snap.time),
                    fmt(grid.abscissa(m)),
                    fmt(snap.values[m])
                )?;
            }
        }
    }
    Ok(())
}

/// Increment-field CSV: x, w.
pub fn write_field_csv<W: Write>(
    out: &mut W,
    grid: &crate::grid::SpaceGrid,
    values: &[f64],
) -> Result<()> {
    writeln!(out, "x,w")?;
    for (m, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", fmt(grid.abscissa(m)), fmt(*v))?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
