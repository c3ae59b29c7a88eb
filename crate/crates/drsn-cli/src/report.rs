use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

/// One pass/fail item of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    /// A boolean outcome, recorded with the measured defect.
    pub fn flag(name: &str, passed: bool, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            passed,
            measured,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &'static str, checks: Vec<Check>, result: T) -> Self {
        Report {
            schema: SCHEMA,
            command,
            passed: checks.iter().all(|c| c.passed),
            checks,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Write `text` to `path`, or to standard output without a path.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
