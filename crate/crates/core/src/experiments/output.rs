use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::config::OutputFormat;
use crate::error::Result;

/// One `x y` series of a table for plot output.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: usize,
    pub y: usize,
    /// Only rows whose `filter.0` column equals `filter.1`.
    pub filter: Option<(usize, String)>,
}

/// A named table with a fixed header; cells are already formatted.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub series: Vec<Series>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
            series: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn with_series(mut self, name: &str, x: &str, y: &str) -> Self {
        let col = |c: &str| {
            self.header
                .iter()
                .position(|h| *h == c)
                .expect("column in header")
        };
        let s = Series {
            name: name.into(),
            x: col(x),
            y: col(y),
            filter: None,
        };
        self.series.push(s);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Rows as JSON objects; numeric-looking cells become numbers.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, cell)| ((*h).to_string(), cell_value(cell)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    /// Blank-line separated `x y` blocks, one per series.
    pub fn to_plotdata(&self) -> String {
        let mut s = String::new();
        let series = if self.series.is_empty() && self.header.len() >= 2 {
            vec![Series {
                name: self.header[1].into(),
                x: 0,
                y: 1,
                filter: None,
            }]
        } else {
            self.series.clone()
        };
        for (i, ser) in series.iter().enumerate() {
            if i > 0 {
                s.push_str("\n\n");
            }
            let _ = writeln!(s, "# {}", ser.name);
            let _ = writeln!(s, "{} {}", self.header[ser.x], self.header[ser.y]);
            for row in &self.rows {
                if ser.filter.as_ref().is_some_and(|(c, v)| row[*c] != *v) {
                    continue;
                }
                let _ = writeln!(s, "{} {}", row[ser.x], row[ser.y]);
            }
        }
        s
    }
}

fn cell_value(cell: &str) -> Value {
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(f) if f.is_finite() => Value::from(f),
        _ => match cell {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            "" => Value::Null,
            other => Value::String(other.into()),
        },
    }
}

/// Shortest round-trip text for a float.
pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

/// Writes every table in `format` plus `summary.json`; returns the paths.
pub fn emit_report(
    tables: &[Table],
    summary: &Value,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for t in tables {
        let (ext, text) = match format {
            OutputFormat::Csv => ("csv", t.to_csv()),
            OutputFormat::Json => ("json", serde_json::to_string_pretty(&t.to_json())? + "\n"),
            OutputFormat::Plotdata => ("dat", t.to_plotdata()),
        };
        let path = out_dir.join(format!("{}.{ext}", t.name));
        std::fs::write(&path, text)?;
        written.push(path);
    }
    let path = out_dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(summary)? + "\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_keeps_its_header() {
        let t = Table::new("empty", &["beta", "logmean"]);
        assert_eq!(t.to_csv(), "beta,logmean\n");
        assert_eq!(t.to_json(), Value::Array(vec![]));
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&[t], &Value::Null, OutputFormat::Csv, dir.path()).unwrap();
        assert_eq!(
            std::fs::read_to_string(&files[0]).unwrap(),
            "beta,logmean\n"
        );
    }

    #[test]
    fn plotdata_is_two_columns() {
        let mut t = Table::new("arrhenius", &["beta", "mean", "logmean"]);
        t.push(vec!["2".into(), "7.389".into(), "2".into()]);
        t.push(vec!["3".into(), "20.08".into(), "3".into()]);
        let t = t.with_series("log mean", "beta", "logmean");
        assert_eq!(t.to_plotdata(), "# log mean\nbeta logmean\n2 2\n3 3\n");
        let json = t.to_json();
        assert_eq!(json[1]["mean"], Value::from(20.08));
    }
}
