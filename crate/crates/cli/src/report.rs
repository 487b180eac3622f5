//! CSV / JSON encoding of campaign reports.

use std::str::FromStr;

use v2x_core::metrics::PdrReport;

use crate::CliError;

/// Exact CSV header.
pub const CSV_HEADER: [&str; 11] = [
    "scenario",
    "cw",
    "density",
    "snapshots",
    "pdr_raw_mean",
    "pdr_raw_ci95",
    "blockage_rate",
    "pdr_discounted_mean",
    "pdr_discounted_ci95",
    "base_seed",
    "flags",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

fn rate(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

pub(crate) fn csv_dialect(rows: &[Vec<String>], header: &[&str]) -> Vec<u8> {
    csv_bytes(header, rows.iter().cloned())
}

/// Encodes reports; rates are printed with 6 decimals in CSV and at full
/// precision in JSON.
pub fn emit_report(reports: &[PdrReport], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(
            &CSV_HEADER,
            reports.iter().map(|r| {
                vec![
                    r.scenario.clone(),
                    r.cw.to_string(),
                    r.density.to_string(),
                    r.snapshots.to_string(),
                    rate(r.pdr_raw_mean),
                    rate(r.pdr_raw_ci95),
                    rate(r.blockage_rate),
                    rate(r.pdr_discounted_mean),
                    rate(r.pdr_discounted_ci95),
                    r.base_seed.to_string(),
                    r.flags.join(";"),
                ]
            }),
        ),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(reports).expect("reports serialize");
            v.push(b'\n');
            v
        }
    }
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, String> {
    let raw = rec.get(i).ok_or_else(|| format!("missing column `{}`", CSV_HEADER[i]))?;
    raw.parse().map_err(|_| format!("bad value `{raw}` in column `{}`", CSV_HEADER[i]))
}

/// Parses a CSV report produced by [`emit_report`].
pub fn parse_report_csv(bytes: &[u8]) -> Result<Vec<PdrReport>, String> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            let flags: String = field(&rec, 10)?;
            Ok(PdrReport {
                scenario: field(&rec, 0)?,
                cw: field(&rec, 1)?,
                density: field(&rec, 2)?,
                snapshots: field(&rec, 3)?,
                pdr_raw_mean: field(&rec, 4)?,
                pdr_raw_ci95: field(&rec, 5)?,
                blockage_rate: field(&rec, 6)?,
                pdr_discounted_mean: field(&rec, 7)?,
                pdr_discounted_ci95: field(&rec, 8)?,
                base_seed: field(&rec, 9)?,
                flags: flags.split(';').filter(|f| !f.is_empty()).map(str::to_string).collect(),
            })
        })
        .collect()
}

pub fn parse_report_json(bytes: &[u8]) -> Result<Vec<PdrReport>, String> {
    serde_json::from_slice(bytes).map_err(|e| e.to_string())
}

/// Loads `report.csv` (or, failing that, `report.json`) from a run directory.
pub fn load_reports(dir: &std::path::Path) -> Result<Vec<PdrReport>, CliError> {
    for format in [Format::Csv, Format::Json] {
        let path = dir.join(format!("report.{}", format.extension()));
        if !path.exists() {
            continue;
        }
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        let parsed = match format {
            Format::Csv => parse_report_csv(&bytes),
            Format::Json => parse_report_json(&bytes),
        };
        return parsed.map_err(|reason| CliError::Report { path, reason });
    }
    Err(CliError::io(
        dir.join("report.csv"),
        std::io::Error::new(std::io::ErrorKind::NotFound, "no report.csv or report.json"),
    ))
}
