//! Certificates for both sides of the dichotomy, their independent
//! verifiers, and leftmost uniformization.
//!
//! Verifiers use tree primitives and bounded snapshots only; they never
//! consult the fixpoints that produced the certificate.

pub mod cover;
pub mod positive;
pub mod uniformize;

use serde::{Deserialize, Serialize};

pub use cover::{build_cover, cover_tree, naive_cover, verify_cover, verify_cover_with, CoverMode, CoverPiece, CoverScheme};
pub use positive::{build_witness, verify_witness, verify_witness_at, witness_escape, WitnessPairTree};
pub use uniformize::{leftmost_uniformize, Uniformization};

/// Outcome of one named verifier check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Check {
    pub fn new(name: &str, failures: Vec<String>) -> Self {
        Check {
            name: name.to_string(),
            passed: failures.is_empty(),
            failures,
        }
    }
}

/// A verifier report: accepted iff every check passed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn accepted(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `name: failure` for every failure, in check order.
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name)))
            .collect()
    }
}
