//! CSV tables and optional gnuplot scripts under a per-run directory.

use crate::CliError;
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal form, so repeated runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Default)]
pub struct Output {
    dir: Option<PathBuf>,
    gnuplot: bool,
}

impl Output {
    /// Discards all tables.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn to_dir(dir: &Path, gnuplot: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: Some(dir.to_path_buf()),
            gnuplot,
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Writes `<name>.csv`; `log_axes` picks the axis scaling of the plot script.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>], log_axes: bool) -> Result<(), CliError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let path = dir.join(format!("{name}.csv"));
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if self.gnuplot {
            let script = gnuplot_script(name, header, log_axes);
            let gp = dir.join(format!("{name}.gp"));
            fs::write(&gp, script).map_err(|e| CliError::Io(format!("{}: {e}", gp.display())))?;
        }
        Ok(())
    }

    /// Numeric rows; every value goes through [`num`].
    pub fn numeric(&self, name: &str, header: &[&str], rows: &[Vec<f64>], log_axes: bool) -> Result<(), CliError> {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| num(*v)).collect()).collect();
        self.table(name, header, &text, log_axes)
    }
}

fn gnuplot_script(name: &str, header: &[&str], log_axes: bool) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    if log_axes {
        s.push_str("set logscale xy\nset format xy '%g'\n");
    }
    s.push_str(&format!("set xlabel '{}'\n", header.first().copied().unwrap_or("x")));
    s.push_str(&format!(
        "set terminal pngcairo size 900,600\nset output '{name}.png'\n"
    ));
    let plots: Vec<String> = (2..=header.len())
        .map(|c| format!("'{name}.csv' using 1:(abs(${c})) with linespoints"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
