use std::fmt;

use serde::{Deserialize, Serialize};

/// The condition a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "QH1")]
    Qh1,
    #[serde(rename = "QH2")]
    Qh2,
    #[serde(rename = "QH3")]
    Qh3,
    #[serde(rename = "QR1")]
    Qr1,
    #[serde(rename = "QR2")]
    Qr2,
    #[serde(rename = "QS1")]
    Qs1,
    #[serde(rename = "QS2")]
    Qs2,
    #[serde(rename = "MR1")]
    Mr1,
    #[serde(rename = "MR2")]
    Mr2,
    Projector,
    Normalization,
    Homomorphism,
    Povm,
    Binary,
    SelfAdjoint,
    Commutation,
    Constraint,
    Witness,
    ProjectiveAlice,
    ProjectiveBob,
    MaxEntangled,
    TransposeLink,
    RelationZero,
    ProductForm,
    Affine,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub location: String,
    pub detail: String,
}

/// Outcome of a verification: `pass` is true iff `violations` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Self { pass: true, violations: Vec::new() }
    }

    pub fn push(&mut self, condition: Condition, location: impl Into<String>, detail: impl Into<String>) {
        self.pass = false;
        self.violations.push(Violation { condition, location: location.into(), detail: detail.into() });
    }

    pub fn extend(&mut self, other: Report) {
        self.pass &= other.pass;
        self.violations.extend(other.violations);
    }

    pub fn failed(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            return writeln!(f, "PASS");
        }
        writeln!(f, "FAIL ({} violations)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  [{}] {}: {}", v.condition, v.location, v.detail)?;
        }
        Ok(())
    }
}
