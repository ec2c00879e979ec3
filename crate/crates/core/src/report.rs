//! CSV output. Column set and order are fixed.

use std::io::Write;

use crate::montecarlo::{SweepResult, SweepRow};
use crate::Result;

pub const CSV_HEADER: [&str; 12] = [
    "scheme",
    "csi",
    "sweep_variable",
    "sweep_value",
    "mean_tx_power_W",
    "mean_tx_power_dBm",
    "mean_total_power_W",
    "ee_bits_per_joule",
    "std_err_W",
    "infeasible_count",
    "n_realizations",
    "seed",
];

/// Shortest decimal that parses back to the same `f64`.
fn num(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "NaN".to_string(),
    }
}

fn csv_line(row: &SweepRow) -> String {
    let tx = row.tx_power;
    [
        row.series.scheme_label().to_string(),
        row.series.csi_label().to_string(),
        row.sweep_variable.to_string(),
        format!("{}", row.sweep_value),
        num(tx.map(|t| t.mean)),
        num(tx.map(|t| t.mean_dbm)),
        num(row.mean_total_power),
        num(row.energy_efficiency),
        num(tx.map(|t| t.std_err)),
        row.infeasible_count.to_string(),
        row.realizations.to_string(),
        row.seed.to_string(),
    ]
    .join(",")
}

/// Writes the header and one row per (series, sweep point), LF terminated.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for row in &result.rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}
