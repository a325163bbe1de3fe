//! Residual bookkeeping shared by the verification routines.

use serde::{Deserialize, Serialize};

/// Worst residual of one identity over a set of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self { name: name.into(), residual: 0.0, tolerance, samples: 0, pass: true }
    }

    /// Records one sample; a NaN residual fails the check.
    pub fn record(&mut self, residual: f64) {
        self.samples += 1;
        if residual.is_nan() {
            self.residual = f64::NAN;
        } else if !self.residual.is_nan() {
            self.residual = self.residual.max(residual);
        }
        self.pass = self.residual <= self.tolerance;
    }

    pub fn single(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let mut c = Self::new(name, tolerance);
        c.record(residual);
        c
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails() {
        let mut c = Check::new("x", 1e-9);
        c.record(1e-12);
        assert!(c.pass);
        c.record(f64::NAN);
        assert!(!c.pass);
        c.record(0.0);
        assert!(!c.pass);
    }
}
