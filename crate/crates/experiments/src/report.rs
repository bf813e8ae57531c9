//! Table reports and their CSV / Markdown renderings.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ExperimentId, OutputFormat};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("write failed: {0}")]
    Stream(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv has no header row")]
    MissingHeader,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(v) => Some(*v),
            Value::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Inverse of the `Display` rendering.
    pub fn parse(s: &str) -> Value {
        if s == "-" || s.is_empty() {
            Value::Missing
        } else if let Ok(n) = s.parse::<u64>() {
            Value::Int(n)
        } else if let Ok(v) = s.parse::<f64>() {
            Value::Float(v)
        } else {
            Value::Text(s.to_string())
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as u64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // four significant digits
            Value::Float(v) => write!(f, "{v:.3e}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => f.write_str("-"),
        }
    }
}

/// How the Markdown rendering arranges rows.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// One Markdown row per report row.
    Flat,
    /// Rows grouped by `row_keys`, one column per distinct `col_key` value, and
    /// one Markdown line per entry of `lines` within each group.
    Pivot {
        row_keys: Vec<&'static str>,
        col_key: &'static str,
        lines: Vec<&'static str>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub experiment: ExperimentId,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Config echo and version, shown in the Markdown header.
    pub provenance: Vec<(String, String)>,
    /// Set when the experiment reproduces behaviour rather than exact numbers.
    pub qualitative: bool,
    pub layout: Layout,
}

impl TableReport {
    pub fn new(experiment: ExperimentId, title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            experiment,
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: vec![("version".into(), env!("CARGO_PKG_VERSION").into())],
            qualitative: false,
            layout: Layout::Flat,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell of `row` in column `name`.
    pub fn get(&self, row: usize, name: &str) -> Option<&Value> {
        self.column(name)
            .and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    /// Rows whose text or numeric cells equal the given values, in order.
    pub fn rows_where<'a>(
        &'a self,
        filters: &'a [(&'a str, Value)],
    ) -> impl Iterator<Item = usize> + 'a {
        (0..self.rows.len()).filter(move |&r| {
            filters.iter().all(|(name, want)| {
                self.get(r, name)
                    .is_some_and(|v| v.to_string() == want.to_string())
            })
        })
    }
}

pub fn emit_csv<W: Write>(report: &TableReport, out: W) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Columns and typed rows read back from [`emit_csv`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv, ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let header = records.next().ok_or(ReportError::MissingHeader)??;
    let columns = header.iter().map(str::to_string).collect();
    let rows = records
        .map(|rec| rec.map(|rec| rec.iter().map(Value::parse).collect()))
        .collect::<Result<_, _>>()?;
    Ok(ParsedCsv { columns, rows })
}

fn md_row<W: Write>(out: &mut W, cells: &[String]) -> io::Result<()> {
    writeln!(out, "| {} |", cells.join(" | "))
}

fn md_separator<W: Write>(out: &mut W, n: usize) -> io::Result<()> {
    writeln!(out, "|{}", "---|".repeat(n))
}

pub fn emit_markdown<W: Write>(report: &TableReport, mut out: W) -> Result<(), ReportError> {
    writeln!(out, "## {} ({})", report.title, report.experiment)?;
    writeln!(out)?;
    if report.qualitative {
        writeln!(
            out,
            "_qualitative: reproduces trends on a substitute problem, not exact values_"
        )?;
        writeln!(out)?;
    }
    let echo: Vec<String> = report
        .provenance
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    writeln!(out, "`{}`", echo.join(" "))?;
    writeln!(out)?;

    match &report.layout {
        Layout::Flat => {
            md_row(&mut out, &report.columns)?;
            md_separator(&mut out, report.columns.len())?;
            for row in &report.rows {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                md_row(&mut out, &cells)?;
            }
        }
        Layout::Pivot {
            row_keys,
            col_key,
            lines,
        } => pivot(report, row_keys, col_key, lines, &mut out)?,
    }
    Ok(())
}

fn pivot<W: Write>(
    report: &TableReport,
    row_keys: &[&str],
    col_key: &str,
    lines: &[&str],
    out: &mut W,
) -> Result<(), ReportError> {
    let cell = |r: usize, name: &str| {
        report
            .get(r, name)
            .map(|v| v.to_string())
            .unwrap_or_default()
    };
    let mut col_values: Vec<String> = Vec::new();
    let mut groups: Vec<(Vec<String>, Vec<usize>)> = Vec::new();
    for r in 0..report.rows.len() {
        let c = cell(r, col_key);
        if !col_values.contains(&c) {
            col_values.push(c);
        }
        let key: Vec<String> = row_keys.iter().map(|k| cell(r, k)).collect();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    let mut header: Vec<String> = row_keys.iter().map(|k| k.to_string()).collect();
    if lines.len() > 1 {
        header.push(String::new());
    }
    header.extend(col_values.iter().map(|c| format!("{col_key}={c}")));
    md_row(out, &header)?;
    md_separator(out, header.len())?;
    for (key, rows) in &groups {
        for (li, line) in lines.iter().enumerate() {
            let mut cells: Vec<String> = if li == 0 {
                key.clone()
            } else {
                vec![String::new(); key.len()]
            };
            if lines.len() > 1 {
                cells.push(line.to_string());
            }
            for c in &col_values {
                let v = rows
                    .iter()
                    .find(|&&r| cell(r, col_key) == *c)
                    .map(|&r| cell(r, line))
                    .unwrap_or_default();
                cells.push(v);
            }
            md_row(out, &cells)?;
        }
    }
    Ok(())
}

pub fn emit<W: Write>(
    report: &TableReport,
    format: OutputFormat,
    out: W,
) -> Result<(), ReportError> {
    match format {
        OutputFormat::Csv => emit_csv(report, out),
        OutputFormat::Markdown => emit_markdown(report, out),
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_report(
    report: &TableReport,
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<(), ReportError> {
    match path {
        Some(p) => {
            let io_err = |source| ReportError::Io {
                path: p.to_path_buf(),
                source,
            };
            let file = File::create(p).map_err(io_err)?;
            let mut buf = io::BufWriter::new(file);
            emit(report, format, &mut buf)?;
            buf.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            emit(report, format, stdout.lock())
        }
    }
}
