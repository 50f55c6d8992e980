//! Delimited trace files.
//!
//! ```text
//! # label: -30
//! frequency_hz,re,im
//! 5999000000,0.98,-0.12
//! ```
//!
//! `# key: value` lines become trace metadata, other `#` lines are ignored.
//! Files with `frequency_hz,amplitude_db,phase_rad` headers are converted to
//! real/imaginary parts on load (`amplitude = 10^(dB/20)`). Output is always
//! real/imaginary with shortest round-trip float formatting, so writing a
//! parsed file reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fanofit::{Complex64, Trace64};

use crate::error::{CliError, CliResult, ErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Columns {
    ReIm,
    DbPhase,
}

/// Splits `# key: value` comment lines into metadata; other comments yield `None`.
pub fn meta_line(line: &str) -> Option<(String, String)> {
    let body = line.trim_start().strip_prefix('#')?.trim();
    let (key, value) = body.split_once(':')?;
    let key = key.trim();
    if key.is_empty() || key.contains(char::is_whitespace) {
        return None;
    }
    Some((key.to_owned(), value.trim().to_owned()))
}

fn column(headers: &[String], name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn detect(headers: &[String]) -> CliResult<(Columns, [usize; 3])> {
    let f = column(headers, "frequency_hz")
        .ok_or_else(|| CliError::parse(format!("missing frequency_hz column in header {headers:?}")))?;
    if let (Some(re), Some(im)) = (column(headers, "re"), column(headers, "im")) {
        return Ok((Columns::ReIm, [f, re, im]));
    }
    if let (Some(a), Some(p)) = (column(headers, "amplitude_db"), column(headers, "phase_rad")) {
        return Ok((Columns::DbPhase, [f, a, p]));
    }
    Err(CliError::parse(format!(
        "header must name re,im or amplitude_db,phase_rad columns, got {headers:?}"
    )))
}

pub fn parse_trace(text: &str) -> CliResult<Trace64> {
    let meta: Vec<(String, String)> = text.lines().filter_map(meta_line).collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::parse(format!("unreadable header: {e}")))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let (columns, idx) = detect(&headers)?;

    let mut freqs = Vec::new();
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(format!("malformed row: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut v = [0.0f64; 3];
        for (slot, &i) in v.iter_mut().zip(&idx) {
            let field = record.get(i).unwrap_or("");
            *slot = field
                .parse()
                .map_err(|_| CliError::parse(format!("line {line}: cannot parse {field:?} as a number")))?;
        }
        freqs.push(v[0]);
        points.push(match columns {
            Columns::ReIm => Complex64::new(v[1], v[2]),
            Columns::DbPhase => Complex64::from_polar(10f64.powf(v[1] / 20.0), v[2]),
        });
    }
    let mut trace = Trace64::new(freqs, points).map_err(|e| CliError::parse(e.to_string()))?;
    trace.meta.extend(meta);
    Ok(trace)
}

pub fn read_trace(path: &Path) -> CliResult<Trace64> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trace(&text).map_err(|e| CliError::new(e.kind, format!("{}: {}", path.display(), e.message)))
}

pub fn format_trace(trace: &Trace64) -> String {
    let mut out = String::new();
    for (k, v) in &trace.meta {
        let _ = writeln!(out, "# {k}: {}", v.replace(['\n', '\r'], " "));
    }
    out.push_str("frequency_hz,re,im\n");
    for (f, p) in trace.iter() {
        let _ = writeln!(out, "{f},{},{}", p.re, p.im);
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display())))
}

/// Shortest round-trip form, with infinities spelled `inf`.
pub fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        v.to_string()
    }
}
