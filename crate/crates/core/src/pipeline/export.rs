//! JSONL and CSV exports of search records, each with a summary footer, and
//! readers for both.
//!
//! JSONL: one record object per line, then `{"summary":{...}}`.
//! CSV: header row, one row per record (`witness` as `"[0,1,3]"`, empty for
//! none), then one `# key=value` line per counter.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pipeline::record::{SearchRecord, Summary};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "p", "t", "nec3", "odd_t", "weil", "dep", "method", "witness", "ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Jsonl,
    Csv,
}

impl ExportFormat {
    /// `.csv` selects CSV, anything else JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => ExportFormat::Csv,
            _ => ExportFormat::Jsonl,
        }
    }
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(ExportFormat::Jsonl),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Footer {
    summary: Summary,
}

pub fn write_jsonl<W: Write>(
    mut out: W,
    records: &[SearchRecord],
    summary: &Summary,
) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(
        &mut out,
        &Footer {
            summary: summary.clone(),
        },
    )?;
    out.write_all(b"\n")?;
    Ok(())
}

fn csv_row(r: &SearchRecord) -> [String; 9] {
    let witness = match &r.witness {
        Some(w) => format!(
            "[{}]",
            w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        ),
        None => String::new(),
    };
    [
        r.p.to_string(),
        r.t.to_string(),
        r.nec3.to_string(),
        r.odd_t.to_string(),
        r.weil.to_string(),
        r.dep.to_string(),
        r.method.as_str().to_string(),
        witness,
        r.ms.to_string(),
    ]
}

pub fn write_csv<W: Write>(mut out: W, records: &[SearchRecord], summary: &Summary) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(CSV_HEADER)?;
        for r in records {
            w.write_record(csv_row(r))?;
        }
        w.flush()?;
    }
    for (k, v) in summary.fields() {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_records<W: Write>(
    out: W,
    format: ExportFormat,
    records: &[SearchRecord],
    summary: &Summary,
) -> Result<()> {
    match format {
        ExportFormat::Jsonl => write_jsonl(out, records, summary),
        ExportFormat::Csv => write_csv(out, records, summary),
    }
}

/// Parses a JSONL export; the summary footer is required.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<(Vec<SearchRecord>, Summary)> {
    let mut records = Vec::new();
    let mut summary = None;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if summary.is_some() {
            return Err(Error::Parse("content after the summary footer".into()));
        }
        if line.starts_with("{\"summary\"") {
            summary = Some(serde_json::from_str::<Footer>(&line)?.summary);
        } else {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok((
        records,
        summary.ok_or_else(|| Error::Parse("missing summary footer".into()))?,
    ))
}

/// Reads record lines of a JSONL file that has no footer (checkpoint
/// sidecar).
pub fn read_jsonl_records<R: BufRead>(input: R) -> Result<Vec<SearchRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok(records)
}

fn parse_field<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {name} `{s}`")))
}

pub fn read_csv<R: BufRead>(input: R) -> Result<(Vec<SearchRecord>, Summary)> {
    let mut body = String::new();
    let mut summary = Summary::default();
    for line in input.lines() {
        let line = line?;
        if let Some(kv) = line.strip_prefix("# ") {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad footer `{line}`")))?;
            summary.set(k, parse_field(v, k)?)?;
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    if reader.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        let witness = match f(7) {
            "" => None,
            w => {
                let inner = w
                    .strip_prefix('[')
                    .and_then(|w| w.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("bad witness `{w}`")))?;
                Some(
                    inner
                        .split(',')
                        .map(|x| parse_field(x, "witness"))
                        .collect::<Result<Vec<u64>>>()?,
                )
            }
        };
        records.push(SearchRecord {
            p: parse_field(f(0), "p")?,
            t: parse_field(f(1), "t")?,
            nec3: parse_field(f(2), "nec3")?,
            odd_t: parse_field(f(3), "odd_t")?,
            weil: parse_field(f(4), "weil")?,
            dep: parse_field(f(5), "dep")?,
            method: f(6).parse()?,
            witness,
            ms: parse_field(f(8), "ms")?,
        });
    }
    Ok((records, summary))
}

pub fn read_records<R: BufRead>(
    input: R,
    format: ExportFormat,
) -> Result<(Vec<SearchRecord>, Summary)> {
    match format {
        ExportFormat::Jsonl => read_jsonl(input),
        ExportFormat::Csv => read_csv(input),
    }
}
