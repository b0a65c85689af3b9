//! CSV and JSON export of aggregated curves.
//!
//! CSV columns: `t, mean_regret, stderr, pull_fraction_1..K, min_pulls_1..K`.
//! Floats are written with Rust's shortest round-trip formatting, so a
//! re-parse gives back identical values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregate::{AggregateStats, CurveRow};
use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

fn io(e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => HarnessError::Io(e),
        other => HarnessError::Parse(format!("{other:?}")),
    }
}

pub fn header(num_arms: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "mean_regret".into(), "stderr".into()];
    h.extend((1..=num_arms).map(|i| format!("pull_fraction_{i}")));
    h.extend((1..=num_arms).map(|i| format!("min_pulls_{i}")));
    h
}

pub fn write_csv<W: Write>(stats: &AggregateStats, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(stats.num_arms)).map_err(io)?;
    for row in &stats.rows {
        let mut rec = vec![
            row.t.to_string(),
            row.mean_regret.to_string(),
            row.stderr.to_string(),
        ];
        rec.extend(row.pull_fraction.iter().map(f64::to_string));
        rec.extend(row.min_pulls.iter().map(u64::to_string));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, HarnessError> {
    let raw = rec
        .get(i)
        .ok_or_else(|| HarnessError::Parse(format!("missing column {i}")))?;
    raw.parse()
        .map_err(|_| HarnessError::Parse(format!("bad value {raw:?} in column {i}")))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<AggregateStats, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let head = r.headers().map_err(io)?.clone();
    if head.len() < 3 || (head.len() - 3) % 2 != 0 {
        return Err(HarnessError::Parse(format!("unexpected header width {}", head.len())));
    }
    let k = (head.len() - 3) / 2;
    if head.iter().ne(header(k).iter().map(String::as_str)) {
        return Err(HarnessError::Parse("unexpected header names".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        rows.push(CurveRow {
            t: field(&rec, 0)?,
            mean_regret: field(&rec, 1)?,
            stderr: field(&rec, 2)?,
            pull_fraction: (0..k).map(|i| field(&rec, 3 + i)).collect::<Result<_, _>>()?,
            min_pulls: (0..k).map(|i| field(&rec, 3 + k + i)).collect::<Result<_, _>>()?,
        });
    }
    Ok(AggregateStats { num_arms: k, rows })
}

pub fn write_json<W: Write>(stats: &AggregateStats, mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, stats)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_json<R: std::io::Read>(input: R) -> Result<AggregateStats, HarnessError> {
    Ok(serde_json::from_reader(input)?)
}

pub fn export(stats: &AggregateStats, format: ExportFormat, path: &Path) -> Result<(), HarnessError> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        ExportFormat::Csv => write_csv(stats, out),
        ExportFormat::Json => write_json(stats, out),
    }
}

pub fn import(format: ExportFormat, path: &Path) -> Result<AggregateStats, HarnessError> {
    let input = BufReader::new(File::open(path)?);
    match format {
        ExportFormat::Csv => read_csv(input),
        ExportFormat::Json => read_json(input),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats() -> AggregateStats {
        AggregateStats {
            num_arms: 2,
            rows: vec![
                CurveRow {
                    t: 1,
                    mean_regret: 0.0,
                    stderr: 0.0,
                    pull_fraction: vec![1.0, 0.0],
                    min_pulls: vec![1, 0],
                },
                CurveRow {
                    t: 2,
                    mean_regret: 0.1 + 0.2,
                    stderr: 1.0 / 3.0,
                    pull_fraction: vec![0.5, 0.5],
                    min_pulls: vec![1, 1],
                },
                CurveRow {
                    t: 3,
                    mean_regret: 1e-17,
                    stderr: 123_456.789_012_345_67,
                    pull_fraction: vec![2.0 / 3.0, 1.0 / 3.0],
                    min_pulls: vec![2, 1],
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&stats(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("t,mean_regret,stderr,pull_fraction_1,pull_fraction_2,min_pulls_1"));
        assert_eq!(read_csv(&buf[..]).unwrap(), stats());
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_json(&stats(), &mut buf).unwrap();
        assert_eq!(read_json(&buf[..]).unwrap(), stats());
    }

    #[test]
    fn empty_rows_give_header_only() {
        let empty = AggregateStats {
            num_arms: 3,
            rows: vec![],
        };
        let mut buf = Vec::new();
        write_csv(&empty, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(read_csv(&buf[..]).unwrap(), empty);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = export(&stats(), ExportFormat::Csv, Path::new("/nonexistent/dir/x.csv")).unwrap_err();
        assert!(matches!(err, HarnessError::Io(_)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_csv(&b"a,b\n1,2\n"[..]).is_err());
        assert!(read_csv(&b"t,mean_regret,stderr\nx,1,2\n"[..]).is_err());
    }
}
