use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::sweep::ResultRecord;
use crate::error::Result;

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 14] = [
    "scheme",
    "receiver_type",
    "sweep_param",
    "sweep_value",
    "trial",
    "seed",
    "q0_watts",
    "wssr_bps_hz",
    "ir_rates",
    "harvested_watts",
    "power_watts",
    "iterations",
    "wall_ms",
    "status",
];

/// Nine significant digits in scientific notation.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

fn row(r: &ResultRecord) -> [String; 14] {
    let rates: Vec<String> = r.ir_rates.iter().map(|v| fmt_float(*v)).collect();
    [
        r.scheme.clone(),
        r.receiver_type.clone(),
        r.sweep_param.clone(),
        fmt_float(r.sweep_value),
        r.trial.to_string(),
        r.seed.to_string(),
        fmt_float(r.q0_watts),
        fmt_float(r.wssr_bps_hz),
        rates.join(";"),
        fmt_float(r.harvested_watts),
        fmt_float(r.power_watts),
        r.iterations.to_string(),
        r.wall_ms.to_string(),
        r.status.clone(),
    ]
}

/// Header plus one row per record, LF line endings. Per-IR rates share one `;`-separated cell.
pub fn write_csv_to<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[ResultRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv_to(records, BufWriter::new(file))
}
