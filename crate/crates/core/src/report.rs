//! Residual tables with fixed-format CSV and JSON summaries.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Formats a float with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Named numeric columns, one row per sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub name: String,
    pub max: f64,
    pub mean: f64,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.index_of(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Max of `|x|` over a column (NaN propagates as NaN).
    pub fn max_abs(&self, name: &str) -> Option<f64> {
        let col = self.column(name)?;
        Some(col.iter().fold(0.0f64, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) }))
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Max and mean of `|x|` for every column except the leading
    /// `skip` coordinate columns.
    pub fn summary(&self, skip: usize) -> Vec<ColumnSummary> {
        self.columns
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(k, name)| {
                let n = self.rows.len().max(1) as f64;
                let (mut max, mut sum) = (0.0f64, 0.0);
                for r in &self.rows {
                    let a = r[k].abs();
                    max = if a.is_nan() || max.is_nan() { f64::NAN } else { max.max(a) };
                    sum += a;
                }
                ColumnSummary { name: name.clone(), max, mean: sum / n }
            })
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Serializes a value as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_fixed_format() {
        let mut t = Table::new(&["u", "r"]);
        t.push(vec![0.1, -2.0]);
        assert_eq!(t.to_csv(), "u,r\n1.0000000000000001e-1,-2.0000000000000000e0\n");
    }

    #[test]
    fn summary_skips_coordinates() {
        let mut t = Table::new(&["u", "a"]);
        t.push(vec![5.0, -1.0]);
        t.push(vec![6.0, 3.0]);
        let s = t.summary(1);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].max, 3.0);
        assert_eq!(s[0].mean, 2.0);
    }
}
