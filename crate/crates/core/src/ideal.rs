//! Dilute ideals on ℕ: `X ∈ I` iff `X \ E` is finite for a fixed base `E`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::epset::EPSet;
use crate::error::{Error, Result};
use crate::ntree::MAX_PRESENTATION_MODULUS;

/// A proper dilute ideal. `Fin` has the empty base.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ideal {
    base: EPSet,
}

impl Ideal {
    pub fn fin() -> Self {
        Ideal {
            base: EPSet::empty(),
        }
    }

    /// Rejects bases whose complement is finite.
    pub fn dilute(base: EPSet) -> Result<Self> {
        if base.modulus_lcm() > MAX_PRESENTATION_MODULUS {
            return Err(Error::Validation(format!(
                "lcm of ideal base moduli exceeds {MAX_PRESENTATION_MODULUS}"
            )));
        }
        if base.complement().is_finite() {
            return Err(Error::ImproperIdeal);
        }
        Ok(Ideal { base })
    }

    pub fn base(&self) -> &EPSet {
        &self.base
    }

    pub fn is_fin(&self) -> bool {
        self.base.is_finite()
    }

    /// `X ∈ I`.
    pub fn contains(&self, x: &EPSet) -> bool {
        x.difference_is_finite(&self.base)
    }

    /// The ideal generated by both: base `E1 ∪ E2`.
    pub fn join(&self, other: &Ideal) -> Result<Ideal> {
        Ideal::dilute(self.base.union(&other.base))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fin() {
            write!(f, "Fin")
        } else {
            write!(f, "Dilute({})", self.base.normalized())
        }
    }
}

impl EPSet {
    pub(crate) fn modulus_lcm(&self) -> u64 {
        self.classes
            .iter()
            .map(|c| c.modulus())
            .fold(1, crate::epset::lcm)
    }
}
