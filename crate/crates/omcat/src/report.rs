//! Validation reports and yes/no verdicts with structured witnesses.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One violated condition, naming the offending cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Stable machine-readable tag, e.g. `"globular-ss-st"` or `"assoc"`.
    pub code: String,
    /// Dimension at which the violation occurs, when meaningful.
    pub dim: Option<usize>,
    /// Cells involved, in the order the condition quantifies them.
    pub cells: Vec<String>,
    /// Human-readable description.
    pub message: String,
}

/// Outcome of an exhaustive validity check: empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, code: &str, dim: Option<usize>, cells: &[&str], message: String) {
        self.violations.push(Violation {
            code: code.to_string(),
            dim,
            cells: cells.iter().map(|c| c.to_string()).collect(),
            message,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Appends all violations of `other` to `self`.
    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "[{}] {}", v.code, v.message)?;
        }
        Ok(())
    }
}

/// Structured witness for a failed condition: the quantified dimension and
/// the cells instantiating the failing case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub dim: usize,
    pub cells: Vec<String>,
    pub note: String,
}

/// Result of a property check: either it holds, or a counterexample is
/// attached that re-fails the defining condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    pub fn holds() -> Self {
        Verdict { holds: true, counterexample: None }
    }

    pub fn fails(dim: usize, cells: &[&str], note: &str) -> Self {
        Verdict {
            holds: false,
            counterexample: Some(Counterexample {
                dim,
                cells: cells.iter().map(|c| c.to_string()).collect(),
                note: note.to_string(),
            }),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "holds"),
            Some(c) => write!(f, "fails at dim {} ({}): {}", c.dim, c.cells.join(", "), c.note),
        }
    }
}
