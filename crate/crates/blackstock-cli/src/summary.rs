//! Pass/fail bookkeeping for a run.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub pass: bool,
    /// Reported only; never affects the exit code.
    pub advisory: bool,
}

impl Check {
    pub fn band(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: format!("[{lo}, {hi}]"),
            pass: measured >= lo && measured <= hi,
            advisory: false,
        }
    }

    pub fn near(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        Self {
            expected: format!("{target} ± {tol}"),
            ..Self::band(name, measured, target - tol, target + tol)
        }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: format!("≤ {limit:e}"),
            pass: measured <= limit,
            advisory: false,
        }
    }

    pub fn below(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            expected: format!("< {limit}"),
            pass: measured < limit,
            ..Self::at_most(name, measured, limit)
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: format!("≥ {limit}"),
            pass: measured >= limit,
            advisory: false,
        }
    }

    /// A yes/no property; `measured` is 1 when it holds.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            expected: "holds".into(),
            pass: ok,
            advisory: false,
        }
    }

    /// An advisory value with no band attached.
    pub fn report(name: impl Into<String>, measured: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: "reported".into(),
            pass: true,
            advisory: true,
        }
    }

    pub fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    pub fn status(&self) -> &'static str {
        match (self.pass, self.advisory) {
            (true, _) => "PASS",
            (false, true) => "note",
            (false, false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub subcommand: String,
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.into(),
            checks: Vec::new(),
        }
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn hard_failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.advisory && !c.pass).collect()
    }

    pub fn passed(&self) -> bool {
        self.hard_failures().is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.chars().count())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>14}  {:<22}  status", "check", "measured", "expected");
        for c in &self.checks {
            let kind = if c.advisory { " (advisory)" } else { "" };
            let _ = writeln!(
                s,
                "{:<width$}  {:>14.6e}  {:<22}  {}{kind}",
                c.name,
                c.measured,
                c.expected,
                c.status()
            );
        }
        let fails = self.hard_failures();
        if fails.is_empty() {
            let _ = writeln!(s, "{}: all hard checks passed", self.subcommand);
        } else {
            let names: Vec<&str> = fails.iter().map(|c| c.name.as_str()).collect();
            let _ = writeln!(
                s,
                "{}: {} hard check(s) failed: {}",
                self.subcommand,
                fails.len(),
                names.join("; ")
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["check", "measured", "expected", "status", "advisory"])?;
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                &crate::output::num(c.measured),
                &c.expected,
                c.status(),
                if c.advisory { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn advisory_failures_do_not_change_exit_code() {
        let mut s = RunSummary::new("t");
        s.extend([
            Check::at_least("a", 1.0, 0.5),
            Check::at_least("b", 0.0, 0.5).advisory(),
        ]);
        assert_eq!(s.exit_code(), 0);
        s.extend([Check::near("c", 0.3, 0.5, 0.05)]);
        assert_eq!(s.exit_code(), 1);
        assert!(s.table().contains("failed: c"));
    }

    #[test]
    fn bands_are_inclusive() {
        assert!(Check::near("x", 0.54, 0.5, 0.05).pass);
        assert!(Check::band("x", 1.0, 1.0, 2.0).pass);
        assert!(!Check::below("x", 1.0, 1.0).pass);
        assert!(Check::holds("x", true).pass && !Check::holds("x", false).pass);
    }
}
