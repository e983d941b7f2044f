//! Report schemas and deterministic writers shared by the CLI commands.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Version stamp carried by every emitted JSON document.
pub const SCHEMA_VERSION: &str = "1";

/// One verified identity: measured value against its reference.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CaseReport {
    /// Relative comparison against a nonzero reference.
    pub fn relative(id: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let denom = reference.abs().max(1e-300);
        let error = (value - reference).abs() / denom;
        Self { id: id.into(), value, reference, error, tolerance: tol, pass: error <= tol }
    }

    /// Absolute comparison.
    pub fn absolute(id: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let error = (value - reference).abs();
        Self { id: id.into(), value, reference, error, tolerance: tol, pass: error <= tol }
    }

    /// One-sided check `value <= threshold` (error = exceedance).
    pub fn upper_bound(id: impl Into<String>, value: f64, threshold: f64) -> Self {
        let error = (value - threshold).max(0.0);
        Self { id: id.into(), value, reference: threshold, error, tolerance: 0.0, pass: error <= 0.0 }
    }

    /// Boolean check recorded as 0/1 against reference 1.
    pub fn boolean(id: impl Into<String>, ok: bool) -> Self {
        Self {
            id: id.into(),
            value: if ok { 1.0 } else { 0.0 },
            reference: 1.0,
            error: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub cases: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>, cases: Vec<CaseReport>) -> Self {
        let pass = cases.iter().all(|c| c.pass);
        Self { name: name.into(), pass, cases }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: String,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn new(seed: u64, mut suites: Vec<SuiteReport>) -> Self {
        suites.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = suites.iter().all(|s| s.pass);
        Self { schema_version: SCHEMA_VERSION.to_string(), seed, pass, suites }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Plot-ready CSV: one row per case, `id,value,reference,error,tolerance,pass`.
pub fn write_cases_csv(path: &Path, cases: &[CaseReport]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "id,value,reference,error,tolerance,pass")?;
    for c in cases {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.id, c.value, c.reference, c.error, c.tolerance, c.pass
        )?;
    }
    w.flush()?;
    Ok(())
}
