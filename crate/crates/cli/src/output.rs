//! The report every subcommand produces, and its JSON, CSV and table forms.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::OutputFormat;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub pass: bool,
    pub rows: Vec<Value>,
    pub failures: Vec<Value>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { schema: 1, command: command.into(), pass: true, rows: Vec::new(), failures: Vec::new(), summary: Map::new() }
    }

    pub fn row(&mut self, row: impl Serialize) {
        self.rows.push(serde_json::to_value(row).expect("rows serialize"));
    }

    /// Record a failed assertion; the row is kept as a failure record.
    pub fn fail(&mut self, record: impl Serialize) {
        self.pass = false;
        self.failures.push(serde_json::to_value(record).expect("failures serialize"));
    }

    pub fn check(&mut self, ok: bool, record: impl Serialize) {
        if !ok {
            self.fail(record);
        }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).expect("summary serializes"));
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> anyhow::Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            OutputFormat::Csv => {
                let (header, cells) = tabulate(&self.rows);
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&header)?;
                for r in cells {
                    w.write_record(&r)?;
                }
                w.flush()?;
            }
            OutputFormat::Table => {
                let (header, cells) = tabulate(&self.rows);
                let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
                for r in &cells {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |r: &[String]| {
                    r.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
                };
                writeln!(out, "{}", line(&header))?;
                for r in &cells {
                    writeln!(out, "{}", line(r))?;
                }
                writeln!(out, "{} ({} rows, {} failures)", if self.pass { "PASS" } else { "FAIL" }, self.rows.len(), self.failures.len())?;
            }
        }
        Ok(())
    }
}

/// Column names in first-seen order and the rows as strings.
fn tabulate(rows: &[Value]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = Vec::new();
    for r in rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
    }
    let cells = rows
        .iter()
        .map(|r| {
            header
                .iter()
                .map(|k| match r.get(k) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v @ Value::Array(_)) => v.as_array().unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                    Some(v) => v.to_string(),
                })
                .collect()
        })
        .collect();
    (header, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn formats() {
        let mut r = Report::new("demo");
        r.row(json!({"p": 11, "primes": [2, 3]}));
        r.row(json!({"p": 23, "extra": "x"}));
        let mut buf = Vec::new();
        r.write(OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,primes,extra\n11,2 3,\n23,,x\n");
        let mut buf = Vec::new();
        r.write(OutputFormat::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["pass"], true);
        r.check(false, json!({"why": "test"}));
        assert!(!r.pass && r.failures.len() == 1);
    }
}
