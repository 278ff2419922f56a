//! Tabular convergence reports and their serializations.
//!
//! Every quantitative suite in this crate reduces to the same shape of data:
//! a sequence of realization levels (indexed by a size parameter and its ħ),
//! one or more named residual columns, and per-column log–log slopes fitted
//! against ħ. [`ConvergenceTable`] holds that data; the writers render it as
//! pretty JSON, CSV, or a Markdown table. All three are deterministic: field
//! order is fixed by the struct definitions and row order by construction.

use serde::Serialize;

use crate::qcat::fit_tail_slope;
use crate::Result;

/// One residual column of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    /// Column name (e.g. the probe pair it measures).
    pub name: String,
    /// One residual per row.
    pub values: Vec<f64>,
    /// Asymptotic log–log decay slope of the residuals against ħ
    /// (tail-window fit; see `qcat::fit_tail_slope`), when fittable.
    pub slope: Option<f64>,
}

/// A convergence table: levels down the rows, residuals across the columns.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    /// What the table measures.
    pub title: String,
    /// Name of the size parameter (e.g. "k" or "q").
    pub x_label: String,
    /// Size parameter per row.
    pub xs: Vec<f64>,
    /// Deformation parameter per row; slopes are fitted against this.
    pub hbars: Vec<f64>,
    /// The residual columns.
    pub columns: Vec<Column>,
}

impl ConvergenceTable {
    /// Create an empty table with the given row axis.
    pub fn new(title: &str, x_label: &str, xs: Vec<f64>, hbars: Vec<f64>) -> Self {
        assert_eq!(xs.len(), hbars.len(), "row axes must agree");
        ConvergenceTable {
            title: title.to_string(),
            x_label: x_label.to_string(),
            xs,
            hbars,
            columns: Vec::new(),
        }
    }

    /// Append a residual column and fit its asymptotic slope against ħ.
    pub fn push_column(&mut self, name: &str, values: Vec<f64>) {
        assert_eq!(values.len(), self.xs.len(), "column length must match rows");
        let slope = fit_tail_slope(&self.hbars, &values);
        self.columns.push(Column {
            name: name.to_string(),
            values,
            slope,
        });
    }

    /// Look up a column's fitted slope by name.
    pub fn slope_of(&self, name: &str) -> Option<f64> {
        self.columns.iter().find(|c| c.name == name)?.slope
    }

    /// Asymptotic decay slope of a named column against the row axis
    /// (e.g. against k rather than ħ).
    pub fn slope_vs_x(&self, name: &str) -> Option<f64> {
        let col = self.columns.iter().find(|c| c.name == name)?;
        fit_tail_slope(&self.xs, &col.values)
    }

    /// The residuals of a named column.
    pub fn column_values(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Maximum residual in a named column.
    pub fn max_of(&self, name: &str) -> Option<f64> {
        self.columns
            .iter()
            .find(|c| c.name == name)?
            .values
            .iter()
            .cloned()
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    }

    /// Render as CSV: a header row, then one row per level. Slopes are
    /// appended as a trailing comment-like row labelled "slope".
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.x_label.clone(), "hbar".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for row in 0..self.xs.len() {
            let mut rec = vec![format_float(self.xs[row]), format_float(self.hbars[row])];
            rec.extend(self.columns.iter().map(|c| format_float(c.values[row])));
            w.write_record(&rec)?;
        }
        let mut slope_row = vec!["slope".to_string(), String::new()];
        slope_row.extend(self.columns.iter().map(|c| match c.slope {
            Some(s) => format_float(s),
            None => String::new(),
        }));
        w.write_record(&slope_row)?;
        let bytes = w
            .into_inner()
            .map_err(|e| crate::Error::Consistency(format!("csv finalization failed: {e}")))?;
        Ok(String::from_utf8(bytes)
            .map_err(|e| crate::Error::Consistency(format!("csv produced invalid utf-8: {e}")))?)
    }

    /// Render as a GitHub-flavored Markdown table with a slope footer row.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("### {}\n\n", self.title));
        out.push_str(&format!("| {} | hbar |", self.x_label));
        for c in &self.columns {
            out.push_str(&format!(" {} |", c.name));
        }
        out.push('\n');
        out.push_str("| --- | --- |");
        for _ in &self.columns {
            out.push_str(" --- |");
        }
        out.push('\n');
        for row in 0..self.xs.len() {
            out.push_str(&format!(
                "| {} | {} |",
                format_float(self.xs[row]),
                format_float(self.hbars[row])
            ));
            for c in &self.columns {
                out.push_str(&format!(" {} |", format_float(c.values[row])));
            }
            out.push('\n');
        }
        out.push_str("| slope | |");
        for c in &self.columns {
            match c.slope {
                Some(s) => out.push_str(&format!(" {} |", format_float(s))),
                None => out.push_str(" — |"),
            }
        }
        out.push('\n');
        out
    }
}

/// Serialize any report value as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Shortest lossless decimal rendering of a float (csv/markdown cells).
fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v}")
    } else {
        let mut s = format!("{v:e}");
        // Normalize "1.23e-5" exponent form Rust emits ("1.23e-5" already).
        if !s.contains('e') {
            s = format!("{v}");
        }
        s
    }
}
