//! CSV and plain-text rendering of convergence studies and weight tables.
//!
//! Floats are written in full double precision (`{:.16e}`); non-finite values
//! become the tokens `Inf`, `-Inf` and `NaN`.

use std::fmt::Write as _;
use std::io::Write;

use crate::calculus::{grunwald_weights, WeightTable};
use crate::error::Result;
use crate::verification::ConvergenceReport;

pub const CSV_HEADER: [&str; 9] = ["case", "alpha", "beta", "lambda", "h", "tau", "error", "rate", "wall_ms"];

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == f64::INFINITY {
        "Inf".into()
    } else if v == f64::NEG_INFINITY {
        "-Inf".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Short form used in human-readable tables.
pub fn format_short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4e}")
    } else {
        format_float(v)
    }
}

/// Writes one CSV row per level. With `timing` off the `wall_ms` column is
/// `0`, which makes the output byte-identical across runs.
pub fn write_convergence_csv<W: Write>(report: &ConvergenceReport, out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let c = &report.case;
    for row in &report.rows {
        w.write_record([
            c.id.to_string(),
            format_float(c.alpha),
            c.beta.map(format_float).unwrap_or_default(),
            format_float(c.lambda),
            format_float(row.h),
            format_float(row.tau),
            format_float(row.error),
            row.rate.map(format_float).unwrap_or_default(),
            if timing { format!("{:.3}", row.wall_ms) } else { "0".into() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Table with `h`, error and rate columns, one line per level.
pub fn render_convergence_table(report: &ConvergenceReport) -> String {
    let c = &report.case;
    let mut s = String::new();
    let beta = c.beta.map(|b| format!(", beta = {b}")).unwrap_or_default();
    let _ = writeln!(
        s,
        "{}: alpha = {}{beta}, lambda = {}, tau = {}",
        c.id,
        c.alpha,
        c.lambda,
        report.coupling.label()
    );
    let _ = writeln!(s, "{:>10}  {:>12}  {:>8}  {:>10}", "h", "e(tau,h)", "rate", "wall_ms");
    for row in &report.rows {
        let rate = row.rate.map(|r| if r.is_finite() { format!("{r:.4}") } else { format_float(r) });
        let _ = writeln!(
            s,
            "{:>10}  {:>12}  {:>8}  {:>10.1}",
            row.h,
            format_short(row.error),
            rate.unwrap_or_default(),
            row.wall_ms
        );
        if let Some(f) = &row.failure {
            let _ = writeln!(s, "{:>10}  ! {f}", "");
        }
    }
    s
}

/// `k, g_k, w_k, sum_{i<=k} w_i` rows for a weight table.
pub fn weight_rows(table: &WeightTable) -> Result<Vec<(usize, f64, f64, f64)>> {
    let g = grunwald_weights(table.params.alpha, table.len() - 1)?;
    let partial = table.partial_sums();
    Ok((0..table.len())
        .map(|k| (k, g.values[k], table.get(k), partial[k]))
        .collect())
}

pub fn write_weights_csv<W: Write>(table: &WeightTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "g", "w", "partial_sum"])?;
    for (k, g, wk, s) in weight_rows(table)? {
        w.write_record([k.to_string(), format_float(g), format_float(wk), format_float(s)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_weights_table(table: &WeightTable) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "alpha = {}, lambda = {}, h = {}",
        table.params.alpha, table.params.lambda, table.h
    );
    let _ = writeln!(s, "{:>5}  {:>24}  {:>24}  {:>24}", "k", "g_k", "w_k", "sum w");
    for (k, g, w, p) in weight_rows(table)? {
        let _ = writeln!(s, "{k:>5}  {g:>24.16e}  {w:>24.16e}  {p:>24.16e}");
    }
    Ok(s)
}
