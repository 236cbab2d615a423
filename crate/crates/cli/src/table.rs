//! CSV output.
//!
//! Every file starts with one `#` line carrying the schema version and
//! run metadata, followed by a header row. Numbers use scientific notation
//! with 12 significant digits; failed points are written as `NaN` and
//! explained in trailing `#` lines.

use std::io::{self, Write};

use fluctoforce::{EquilibriumPoint, PressureBreakdown, PressureError};

pub const SCHEMA: &str = "fluctoforce/1";

/// Columns after the axis column, in output order.
pub const BREAKDOWN_COLUMNS: [&str; 12] = [
    "p_eq_T1",
    "p_eq_T2",
    "p_eq_avg",
    "dp_pw",
    "dp_ew",
    "distance_independent",
    "sb_inside",
    "p_neq_total",
    "plate1_total",
    "plate2_total",
    "normalized",
    "error_estimate",
];

pub const EQUILIBRIA_COLUMNS: [&str; 3] = ["separation", "stability", "pressure_slope"];

pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "NaN".to_string()
    }
}

pub fn write_preamble<W: Write>(out: &mut W, meta: &[(&str, &str)]) -> io::Result<()> {
    write!(out, "# schema={SCHEMA}")?;
    for (k, v) in meta {
        write!(out, " {k}={v}")?;
    }
    writeln!(out)
}

fn breakdown_fields(b: &PressureBreakdown) -> [f64; 12] {
    [
        b.p_eq_t1,
        b.p_eq_t2,
        b.p_eq_avg,
        b.dp_pw,
        b.dp_ew,
        b.distance_independent,
        b.sb_inside,
        b.p_neq_total,
        b.plate1_total,
        b.plate2_total,
        b.normalized().unwrap_or(f64::NAN),
        b.error_estimate,
    ]
}

/// One row per axis value with the full pressure breakdown.
pub fn write_breakdown<W: Write>(
    out: &mut W,
    meta: &[(&str, &str)],
    axis: &str,
    values: &[f64],
    rows: &[Result<PressureBreakdown, PressureError>],
) -> io::Result<()> {
    write_preamble(out, meta)?;
    writeln!(out, "{axis},{}", BREAKDOWN_COLUMNS.join(","))?;
    for (x, row) in values.iter().zip(rows) {
        let fields = match row {
            Ok(b) => breakdown_fields(b),
            Err(_) => [f64::NAN; 12],
        };
        let cells: Vec<String> = fields.iter().map(|v| number(*v)).collect();
        writeln!(out, "{},{}", number(*x), cells.join(","))?;
    }
    for (x, row) in values.iter().zip(rows) {
        if let Err(e) = row {
            writeln!(out, "# failed {axis}={}: {e}", number(*x))?;
        }
    }
    Ok(())
}

/// Arbitrary numeric columns.
pub fn write_columns<W: Write>(
    out: &mut W,
    meta: &[(&str, &str)],
    header: &[&str],
    rows: &[Vec<f64>],
) -> io::Result<()> {
    write_preamble(out, meta)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| number(*v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn write_equilibria<W: Write>(out: &mut W, meta: &[(&str, &str)], points: &[EquilibriumPoint]) -> io::Result<()> {
    write_preamble(out, meta)?;
    writeln!(out, "{}", EQUILIBRIA_COLUMNS.join(","))?;
    for p in points {
        writeln!(
            out,
            "{},{},{}",
            number(p.separation),
            p.stability.label(),
            number(p.pressure_slope)
        )?;
    }
    Ok(())
}
