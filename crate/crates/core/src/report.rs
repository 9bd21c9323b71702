//! Flat output rows and their JSON-lines / CSV encodings.
//!
//! Exact integers are always emitted as decimal strings, fractions as
//! `num/den`, and the log gap with 9 significant digits, so a row
//! serializes to the same bytes on every run.

use std::io::Write;
use std::str::FromStr;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::bounds::BoundReport;
use crate::error::Error;
use crate::lcm_engine::LcmRecord;
use crate::numeric::Nat;
use crate::verifier::{LemmaVerdict, SweepOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    /// Exact integer or fraction, as text.
    Exact(String),
    Bool(bool),
    /// Fixed-precision decimal.
    Decimal(String),
    Text(String),
    Null,
}

impl Value {
    fn csv_field(&self) -> &str {
        match self {
            Value::Exact(s) | Value::Decimal(s) | Value::Text(s) => s,
            Value::Bool(true) => "true",
            Value::Bool(false) => "false",
            Value::Null => "",
        }
    }
}

impl From<&Nat> for Value {
    fn from(v: &Nat) -> Self {
        Value::Exact(v.to_string())
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Exact(v.to_string())
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

/// Ordered key/value row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputRecord {
    fields: Vec<(&'static str, Value)>,
}

impl OutputRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.fields.iter().map(|(_, v)| v)
    }
}

impl Serialize for OutputRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.fields.len()))?;
        for (key, value) in &self.fields {
            match value {
                Value::Exact(s) | Value::Decimal(s) | Value::Text(s) => map.serialize_entry(key, s)?,
                Value::Bool(b) => map.serialize_entry(key, b)?,
                Value::Null => map.serialize_entry(key, &())?,
            }
        }
        map.end()
    }
}

/// `x` rounded to `digits` significant digits in plain decimal notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let mut decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut text = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.99... -> 10.0...).
    let significant = text.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
    if significant > digits && decimals > 0 {
        decimals -= 1;
        text = format!("{x:.decimals$}");
    }
    text
}

pub fn format_gap(gap: f64) -> String {
    format_significant(gap, 9)
}

/// One sweep / `check` row: `u0, r, n, family, a, l, alpha, hypothesis_ok,
/// holds, bound, L_n, gap_log`.
pub fn bound_row(report: &BoundReport) -> OutputRecord {
    let mut row = OutputRecord::new();
    row.push("u0", report.prog.u0())
        .push("r", report.prog.r())
        .push("n", report.n)
        .push("family", Value::Text(report.params.family().name().into()))
        .push("a", report.params.a())
        .push("l", report.params.l())
        .push("alpha", report.params.alpha())
        .push("hypothesis_ok", report.hypothesis_ok)
        .push("holds", report.holds)
        .push("bound", report.bound.as_ref())
        .push("L_n", &report.l_n)
        .push("gap_log", report.gap_log.map_or(Value::Null, |g| Value::Decimal(format_gap(g))));
    row
}

pub fn verdict_row(verdict: &LemmaVerdict) -> OutputRecord {
    let inst = &verdict.instance;
    let status = match verdict.status {
        crate::verifier::Status::Verified => "verified",
        crate::verifier::Status::Failed => "failed",
        crate::verifier::Status::Filtered => "filtered",
    };
    let mut row = OutputRecord::new();
    row.push("lemma", Value::Text(verdict.lemma.name().into()))
        .push("u0", inst.u0)
        .push("r", inst.r)
        .push("n", inst.n)
        .push("a", inst.a)
        .push("l", inst.l)
        .push("alpha", inst.alpha)
        .push("status", Value::Text(status.into()))
        .push("witness", verdict.witness.clone().map_or(Value::Null, Value::Text));
    row
}

/// `k_n`, `L_{n,k_n}`, `C_{n,k_n}` and `A_{n,k_n}` columns.
pub fn record_fields(row: &mut OutputRecord, rec: &LcmRecord) {
    row.push("k_n", rec.k_n)
        .push("L_n_kn", &rec.l_n_kn)
        .push("C_n_kn", Value::Exact(rec.c_n_kn.to_string()))
        .push("A_n_kn", &rec.a_n_kn);
}

pub fn summary_row(outcome: &SweepOutcome) -> OutputRecord {
    let mut row = OutputRecord::new();
    row.push("total_cells", outcome.total_cells)
        .push("hypothesis_filtered", outcome.hypothesis_filtered)
        .push("verified", outcome.verified)
        .push("failed", outcome.failed)
        .push("coprime_skipped", outcome.coprime_skipped);
    let cell = outcome.min_gap.as_ref().map(|m| m.cell);
    row.push("min_gap_u0", cell.map(|c| c.u0))
        .push("min_gap_r", cell.map(|c| c.r))
        .push("min_gap_n", cell.map(|c| c.n))
        .push(
            "min_gap_family",
            cell.map_or(Value::Null, |c| Value::Text(c.family.name().into())),
        )
        .push("min_gap_a", cell.and_then(|c| c.a))
        .push("min_gap_l", cell.and_then(|c| c.l))
        .push("min_gap_alpha", cell.and_then(|c| c.alpha))
        .push(
            "min_gap_log",
            outcome
                .min_gap
                .as_ref()
                .map_or(Value::Null, |m| Value::Decimal(format_gap(m.gap_log))),
        );
    row
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "json" | "jsonl" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Streams rows as JSON lines or CSV. The CSV header is taken from the first
/// row written.
pub struct RowWriter<W: Write> {
    inner: Inner<W>,
}

enum Inner<W: Write> {
    Json(W),
    Csv { writer: csv::Writer<W>, header: bool },
}

impl<W: Write> RowWriter<W> {
    pub fn new(format: Format, out: W) -> Self {
        let inner = match format {
            Format::Json => Inner::Json(out),
            Format::Csv => Inner::Csv {
                writer: csv::WriterBuilder::new().has_headers(false).from_writer(out),
                header: false,
            },
        };
        RowWriter { inner }
    }

    pub fn write(&mut self, row: &OutputRecord) -> std::io::Result<()> {
        match &mut self.inner {
            Inner::Json(out) => {
                serde_json::to_writer(&mut *out, row)?;
                out.write_all(b"\n")
            }
            Inner::Csv { writer, header } => {
                if !*header {
                    writer.write_record(row.keys())?;
                    *header = true;
                }
                writer.write_record(row.values().map(Value::csv_field))?;
                Ok(())
            }
        }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        match &mut self.inner {
            Inner::Json(out) => out.flush(),
            Inner::Csv { writer, .. } => writer.flush(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{check, BoundParams};
    use crate::progression::Progression;

    #[test]
    fn significant_digits() {
        assert_eq!(format_gap(5.975212714974295), "5.97521271");
        assert_eq!(format_gap(0.0123456789123), "0.0123456789");
        assert_eq!(format_gap(123.456789123), "123.456789");
        assert_eq!(format_gap(0.0), "0.00000000");
        assert_eq!(format_gap(9.9999999996), "10.0000000");
    }

    fn sample_row() -> OutputRecord {
        let p = Progression::new(1, 2).unwrap();
        let params = BoundParams::new_t13(2, 3, 2).unwrap();
        bound_row(&check(&params, &p, 12, &Nat::from(1673196525u64)))
    }

    #[test]
    fn json_row_is_canonical() {
        let mut buf = Vec::new();
        {
            let mut w = RowWriter::new(Format::Json, &mut buf);
            w.write(&sample_row()).unwrap();
            w.flush().unwrap();
        }
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"u0\":\"1\",\"r\":\"2\",\"n\":\"12\",\"family\":\"new_t13\",\"a\":\"2\",\"l\":\"3\",\
             \"alpha\":\"2\",\"hypothesis_ok\":true,\"holds\":true,\"bound\":\"4251528\",\
             \"L_n\":\"1673196525\",\"gap_log\":\"5.97521271\"}\n"
        );
    }

    #[test]
    fn csv_row_has_header_once() {
        let mut buf = Vec::new();
        {
            let mut w = RowWriter::new(Format::Csv, &mut buf);
            w.write(&sample_row()).unwrap();
            w.write(&sample_row()).unwrap();
            w.flush().unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "u0,r,n,family,a,l,alpha,hypothesis_ok,holds,bound,L_n,gap_log");
        assert_eq!(lines[1], "1,2,12,new_t13,2,3,2,true,true,4251528,1673196525,5.97521271");
        assert_eq!(lines.len(), 3);
    }
}
