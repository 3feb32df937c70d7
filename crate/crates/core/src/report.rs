//! Structured pass/fail records for lemma and theorem checks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// One verified statement: a quantity, the bound (or the other side of an
/// identity), the residual, and whether it passed at the given tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub residual: f64,
    pub pass: bool,
    pub context: BTreeMap<String, Value>,
}

impl CheckReport {
    /// `value <= bound + tol`; residual is `value - bound` (negative = slack).
    pub fn upper_bound(quantity: &str, value: f64, bound: f64, tol: f64) -> Self {
        CheckReport {
            quantity: quantity.to_string(),
            value,
            bound,
            residual: value - bound,
            pass: value <= bound + tol,
            context: BTreeMap::new(),
        }
    }

    /// `value >= bound - tol`; residual is `bound - value`.
    pub fn lower_bound(quantity: &str, value: f64, bound: f64, tol: f64) -> Self {
        CheckReport {
            quantity: quantity.to_string(),
            value,
            bound,
            residual: bound - value,
            pass: value >= bound - tol,
            context: BTreeMap::new(),
        }
    }

    /// `|lhs - rhs| <= tol`; `value`/`bound` hold the two sides.
    pub fn identity(quantity: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        CheckReport {
            quantity: quantity.to_string(),
            value: lhs,
            bound: rhs,
            residual: (lhs - rhs).abs(),
            pass: (lhs - rhs).abs() <= tol,
            context: BTreeMap::new(),
        }
    }

    pub fn with<T: Into<Value>>(mut self, key: &str, value: T) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    /// Keeps whichever report is "worse": a failing one, or the one with the
    /// larger residual. Used to reduce per-tuple sweeps to a single record.
    pub fn worse(self, other: CheckReport) -> CheckReport {
        match (self.pass, other.pass) {
            (true, false) => other,
            (false, true) => self,
            _ => {
                if other.residual > self.residual {
                    other
                } else {
                    self
                }
            }
        }
    }
}

/// Summary of a batch of checks, as printed by the command line.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
}

impl Summary {
    pub fn of(reports: &[CheckReport]) -> Self {
        Summary {
            passed: reports.iter().filter(|r| r.pass).count(),
            total: reports.len(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.passed == self.total
    }

    pub fn line(&self) -> String {
        if self.all_pass() {
            format!("PASS {}/{}", self.passed, self.total)
        } else {
            format!("FAIL {}/{} checks passed", self.passed, self.total)
        }
    }
}
