//! Tabular output in CSV or aligned plain text.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(CliError::output)?;
        for r in &self.rows {
            w.write_record(r).map_err(CliError::output)?;
        }
        w.into_inner().map_err(|e| CliError::output(e.error()))
    }

    pub fn to_text(&self) -> Vec<u8> {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (i, cell) in r.iter().enumerate().take(cols) {
                widths[i] = widths[i].max(display(cell).chars().count());
            }
        }
        let mut out = Vec::new();
        let line = |cells: &[String], out: &mut Vec<u8>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{:<w$}", display(c), w = *w))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&self.headers, &mut out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&rule, &mut out);
        for r in &self.rows {
            line(r, &mut out);
        }
        out
    }

    /// Writes `<dir>/<stem>.csv` or `<dir>/<stem>.txt`.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{stem}.{}", format.extension()));
        let bytes = match format {
            Format::Csv => self.to_csv()?,
            Format::Text => self.to_text(),
        };
        write_file(&path, &bytes)?;
        Ok(path)
    }
}

fn display(cell: &str) -> String {
    cell.replace(['\n', '\r'], " ")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Integral values print without a fractional part; others use the shortest
/// representation that round-trips.
pub fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

/// Lowercase ASCII slug for file names.
pub fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    let trimmed = out.trim_end_matches('_');
    if trimmed.is_empty() {
        "keyword".to_string()
    } else {
        trimmed.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(30.0), "30");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(100.0 / 3.0), "33.333333333333336");
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("COVID-19 fake news"), "covid_19_fake_news");
        assert_eq!(slug("  hoax!! "), "hoax");
        assert_eq!(slug("???"), "keyword");
    }

    #[test]
    fn text_table_alignment() {
        let mut t = Table::new(["a", "long_header"]);
        t.push(vec!["value".into(), "1".into()]);
        let text = String::from_utf8(t.to_text()).unwrap();
        assert_eq!(text, "a      long_header\n-----  -----------\nvalue  1\n");
    }
}
