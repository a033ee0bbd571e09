//! Report rendering. Machine formats carry rationals as "p/q" text only; the
//! table view may add a clearly approximate float column. All encodings are
//! deterministic: same report, same bytes.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use strassen_core::{Rational, SweepReport};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// A report in column form: one header row, then value rows. Every command
/// lowers its output to this before encoding; JSON additionally carries the
/// structured form when one exists.
pub struct Columns {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn approx(r: &Rational) -> String {
    let v = r.to_f64().unwrap_or(f64::NAN);
    format!("{v:.6}")
}

pub fn render_csv(c: &Columns) -> String {
    let mut out = String::new();
    out.push_str(&c.header.join(","));
    out.push('\n');
    for row in &c.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_table(c: &Columns) -> String {
    let mut widths: Vec<usize> = c.header.iter().map(|h| h.len()).collect();
    for row in &c.rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let emit_row = |out: &mut String, cells: Vec<&str>| {
        let joined = cells
            .iter()
            .zip(widths.iter())
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(joined.trim_end());
        out.push('\n');
    };
    emit_row(&mut out, c.header.to_vec());
    emit_row(
        &mut out,
        widths.iter().map(|_| "-").collect::<Vec<_>>(),
    );
    for row in &c.rows {
        emit_row(&mut out, row.iter().map(|s| s.as_str()).collect());
    }
    out
}

/// Key/value listing for single-record reports in table mode.
pub fn render_fields(fields: &[(&str, String)]) -> String {
    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in fields {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

pub fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}

pub fn sweep_columns(report: &SweepReport, with_approx: bool) -> Columns {
    let mut header = vec![
        "resolution",
        "primal_value",
        "dual_value",
        "dual_set_size",
        "shift_mass",
        "certificate_bound",
    ];
    if with_approx {
        header.push("approx_primal");
    }
    let rows = report
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![
                row.resolution.to_string(),
                row.primal_value.to_string(),
                row.dual_value.to_string(),
                row.dual_set_size.to_string(),
                row.shift_mass.to_string(),
                row.certificate_bound.to_string(),
            ];
            if with_approx {
                cells.push(approx(&row.primal_value));
            }
            cells
        })
        .collect();
    Columns { header, rows }
}

pub fn sweep_json(report: &SweepReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "resolution": row.resolution,
                "primal_value": row.primal_value.to_string(),
                "dual_value": row.dual_value.to_string(),
                "dual_set_size": row.dual_set_size,
                "shift_mass": row.shift_mass.to_string(),
                "certificate_bound": row.certificate_bound.to_string(),
            })
        })
        .collect();
    json!({ "rows": rows })
}
