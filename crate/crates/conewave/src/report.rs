//! CSV and JSON emission with fixed formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::checks::PointRow;
use crate::error::CliResult;

pub const POINTS_FILE: &str = "points.csv";
pub const REPORT_FILE: &str = "report.json";

/// Twelve significant digits in scientific notation; empty for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v == 0.0 {
        // Drops the sign of negative zero.
        return format!("{:.11e}", 0.0);
    }
    format!("{v:.11e}")
}

/// In-memory CSV table; rows are rendered with [`num`].
#[derive(Debug, Clone, Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn push(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        fs::write(dir.join(POINTS_FILE), &self.text)?;
        Ok(())
    }
}

pub const APPROXIMATE_HEADER: [&str; 10] =
    ["t", "x", "region", "re_u", "im_u", "re_H", "im_H", "abs_err", "bound", "bound_ratio"];

pub fn approximate_table(rows: &[PointRow]) -> Table {
    let mut table = Table::new(&APPROXIMATE_HEADER);
    for r in rows {
        table.push(&[
            num(r.t),
            num(r.x),
            r.region.as_str().to_string(),
            num(r.u.re),
            num(r.u.im),
            num(r.h.re),
            num(r.h.im),
            num(r.abs_err),
            num(r.bound),
            num(r.ratio()),
        ]);
    }
    table
}

pub fn write_json<T: Serialize>(dir: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(dir.join(REPORT_FILE), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(num(-0.0), num(0.0));
        assert_eq!(num(f64::NAN), "");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(&[num(2.0), "inside".into()]);
        assert_eq!(t.as_str(), "a,b\n2.00000000000e0,inside\n");
    }
}
