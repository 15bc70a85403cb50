//! CSV tables, JSON summaries and gnuplot scripts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::Result;
use crate::stats::Estimate;

/// A CSV table with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parsed numeric column; unparsable cells become `NaN`.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Shortest round-trip formatting, so equal values always print equally.
pub fn num(x: f64) -> String {
    x.to_string()
}

/// `[estimate, stderr]` cells.
pub fn est(e: Estimate) -> [String; 2] {
    [num(e.estimate), num(e.stderr)]
}

/// Everything an experiment produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub table: Table,
    pub summary: Value,
    /// A hard check failed (lemma or oracle runs only; trends never fail a run).
    pub failed: bool,
    /// Columns plotted by the gnuplot script: (x column, y column, error column).
    pub plot: Option<(String, String, String)>,
}

impl ExperimentOutput {
    pub fn summary_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serialises");
        s.push('\n');
        s
    }

    /// Writes `<out>.csv`, `<out>.json` and, when asked, `<out>.gp`.
    pub fn write_files(&self, out: &Path, plot: bool) -> Result<Vec<PathBuf>> {
        if let Some(parent) = out.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let csv_path = out.with_extension("csv");
        let json_path = out.with_extension("json");
        self.table.write_csv(BufWriter::new(File::create(&csv_path)?))?;
        std::fs::write(&json_path, self.summary_string())?;
        let mut written = vec![csv_path.clone(), json_path];
        if plot {
            if let Some(script) = self.gnuplot_script(&csv_path) {
                let gp = out.with_extension("gp");
                std::fs::write(&gp, script)?;
                written.push(gp);
            }
        }
        Ok(written)
    }

    /// A gnuplot script plotting the main column with error bars.
    pub fn gnuplot_script(&self, csv_path: &Path) -> Option<String> {
        let (x, y, err) = self.plot.as_ref()?;
        let col = |name: &str| self.table.column(name).map(|k| k + 1);
        let (xc, yc, ec) = (col(x)?, col(y)?, col(err)?);
        let file = csv_path.file_name()?.to_string_lossy();
        Some(format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{x}'\nset ylabel '{y}'\n\
             set terminal pngcairo size 800,600\nset output '{stem}.png'\n\
             plot '{file}' using {xc}:{yc}:{ec} with yerrorbars title '{y}'\n",
            stem = csv_path.with_extension("").file_name()?.to_string_lossy(),
        ))
    }
}
