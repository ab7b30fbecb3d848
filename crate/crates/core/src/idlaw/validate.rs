use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimension,
    Symmetry,
    PositiveSemidefinite,
    UnitDirection,
    Positivity,
    Integrability,
    Overlap,
    Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub component: String,
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    pub fn new(component: &str, kind: ViolationKind, message: impl Into<String>) -> Self {
        Self {
            component: component.to_string(),
            kind,
            message: message.into(),
        }
    }
}

/// Every invariant violation found in a triplet; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}: {}", v.component, v.message)?;
        }
        Ok(())
    }
}
