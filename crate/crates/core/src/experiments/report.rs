use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Version of the report CSV layout.
pub const REPORT_SCHEMA: u32 = 1;

/// One point of a plotted series.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub y_err: f64,
}

/// A verdict input: passes iff `lo <= value <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Check {
    pub fn at_least(name: impl Into<String>, value: f64, lo: f64) -> Self {
        Self { name: name.into(), value, lo, hi: f64::INFINITY }
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Self { name: name.into(), value, lo: f64::NEG_INFINITY, hi }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, lo, hi }
    }

    /// `value` is zero, for counts of exact-identity violations.
    pub fn zero(name: impl Into<String>, count: usize) -> Self {
        Self::within(name, count as f64, 0.0, 0.0)
    }

    pub fn passes(&self) -> bool {
        self.lo <= self.value && self.value <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct EstimatorReport {
    pub experiment: String,
    pub config: String,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    /// Extra numbers kept for the reader that do not enter the verdict.
    pub info: Vec<(String, f64)>,
}

impl EstimatorReport {
    pub fn new(experiment: &str, config: String) -> Self {
        Self { experiment: experiment.to_string(), config, ..Default::default() }
    }

    pub fn row(&mut self, series: impl Into<String>, x: f64, y: f64, y_err: f64) {
        self.rows.push(Row { series: series.into(), x, y, y_err });
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.info.push((name.into(), value));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passes()).collect()
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn info_value(&self, name: &str) -> Option<f64> {
        self.info.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Append another report's rows, checks and info under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: EstimatorReport) {
        for mut r in other.rows {
            r.series = format!("{prefix}{}", r.series);
            self.rows.push(r);
        }
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.info {
            self.info.push((format!("{prefix}{k}"), v));
        }
    }

    /// Records `kind,name,x,y,y_err,lo,hi,pass`; `kind` is one of
    /// `meta`, `row`, `info`, `check`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "kind,name,x,y,y_err,lo,hi,pass")?;
        writeln!(out, "meta,schema,{REPORT_SCHEMA},,,,,")?;
        writeln!(out, "meta,experiment:{},,,,,,", self.experiment)?;
        for r in &self.rows {
            writeln!(out, "row,{},{},{},{},,,", r.series, r.x, r.y, r.y_err)?;
        }
        for (k, v) in &self.info {
            writeln!(out, "info,{k},,{v},,,,")?;
        }
        for c in &self.checks {
            writeln!(out, "check,{},,{},,{},{},{}", c.name, c.value, c.lo, c.hi, c.passes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.experiment);
        let _ = writeln!(s, "config: {}", self.config);
        let _ = writeln!(s, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" });
        if !self.rows.is_empty() {
            let _ = writeln!(s, "\n{:<28} {:>12} {:>16} {:>14}", "series", "x", "y", "y_err");
            for r in &self.rows {
                let _ = writeln!(s, "{:<28} {:>12.6} {:>16.8} {:>14.6e}", r.series, r.x, r.y, r.y_err);
            }
        }
        if !self.info.is_empty() {
            let _ = writeln!(s);
            for (k, v) in &self.info {
                let _ = writeln!(s, "{k:<40} {v}");
            }
        }
        let _ = writeln!(s, "\n{:<40} {:>16} {:>12} {:>12}  result", "check", "value", "lo", "hi");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<40} {:>16.8} {:>12.6} {:>12.6}  {}",
                c.name,
                c.value,
                c.lo,
                c.hi,
                if c.passes() { "pass" } else { "FAIL" }
            );
        }
        s
    }
}

/// Tidy `series,x,y,y_err` rows for plotting.
pub fn emit_plot_data<W: Write>(report: &EstimatorReport, out: &mut W) -> Result<()> {
    writeln!(out, "series,x,y,y_err")?;
    for r in &report.rows {
        writeln!(out, "{},{},{},{}", r.series, r.x, r.y, r.y_err)?;
    }
    Ok(())
}

/// Checks read back from a report CSV, with the pass flag as written.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredReport {
    pub experiment: String,
    pub checks: Vec<(Check, bool)>,
}

impl StoredReport {
    /// Whether every stored pass flag agrees with its recomputed verdict.
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|(c, flag)| c.passes() == *flag)
    }
}

pub fn read_report_csv<R: BufRead>(input: R) -> Result<StoredReport> {
    let mut experiment = String::new();
    let mut checks = Vec::new();
    let num = |s: &str, line: usize| -> Result<f64> {
        s.parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("bad number {s:?}") })
    };
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::Parse { line: lineno, msg: format!("expected 8 fields, got {}", f.len()) });
        }
        match f[0] {
            "kind" | "row" | "info" => {}
            "meta" => {
                if f[1] == "schema" && f[2] != REPORT_SCHEMA.to_string() {
                    return Err(Error::Parse { line: lineno, msg: format!("unsupported schema {}", f[2]) });
                }
                if let Some(name) = f[1].strip_prefix("experiment:") {
                    experiment = name.to_string();
                }
            }
            "check" => {
                let c = Check { name: f[1].to_string(), value: num(f[3], lineno)?, lo: num(f[5], lineno)?, hi: num(f[6], lineno)? };
                let flag = match f[7] {
                    "true" => true,
                    "false" => false,
                    other => return Err(Error::Parse { line: lineno, msg: format!("bad pass flag {other:?}") }),
                };
                checks.push((c, flag));
            }
            other => return Err(Error::Parse { line: lineno, msg: format!("unknown record kind {other:?}") }),
        }
    }
    Ok(StoredReport { experiment, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_are_recomputable_from_csv() {
        let mut r = EstimatorReport::new("demo", "rho=0.5".into());
        r.row("var", 250.0, 12.5, 0.3);
        r.info("bonferroni_alpha", 0.01 / 3.0);
        r.check(Check::at_least("ks_p", 0.2, 0.01));
        r.check(Check::at_most("ratio", 7.0, 5.0));
        r.check(Check::within("slope", f64::NAN, 0.55, 0.8));
        r.check(Check::zero("violations", 0));
        assert!(!r.passed());
        assert_eq!(r.failed_checks().len(), 2);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let stored = read_report_csv(&buf[..]).unwrap();
        assert_eq!(stored.experiment, "demo");
        assert_eq!(stored.checks.len(), 4);
        assert!(stored.consistent());
        assert!(!stored.checks[2].1);
        let text = r.to_text();
        assert!(text.contains("verdict: FAIL"));
        let mut plot = Vec::new();
        emit_plot_data(&r, &mut plot).unwrap();
        assert_eq!(String::from_utf8(plot).unwrap(), "series,x,y,y_err\nvar,250,12.5,0.3\n");
    }

    #[test]
    fn tampered_flag_is_detected() {
        let csv = "kind,name,x,y,y_err,lo,hi,pass\ncheck,c,,2,,0,1,true\n";
        assert!(!read_report_csv(csv.as_bytes()).unwrap().consistent());
        assert!(read_report_csv("check,c,,x,,0,1,true\n".as_bytes()).is_err());
    }
}
