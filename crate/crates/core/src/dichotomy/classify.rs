//! One verdict per (presentation, ideal), always carrying a certificate
//! that passed its verifier.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::derive::{derive_sequence, DerivativeTrace};
use super::kernel::{big_states, positive_kernel};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::pairtree::PairTree;
use crate::witness::cover::{build_cover, verify_cover};
use crate::witness::positive::{derivative_witness, kernel_witness};
use crate::witness::{CoverScheme, WitnessPairTree};

/// Verifier bounds used for self-checks: depth, letter bound, cover index.
pub const SELF_CHECK: (usize, u64, u64) = (4, 8, 8);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Kernel,
    Derivative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Kernel => "kernel",
            Method::Derivative => "derivative",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernel" => Ok(Method::Kernel),
            "derivative" => Ok(Method::Derivative),
            other => Err(Error::Validation(format!("unknown method {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    SmallCover(CoverScheme),
    Positive(WitnessPairTree),
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Positive(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Size of each fixpoint or derivative stage.
    pub stage_counts: Vec<usize>,
    pub game_calls: usize,
    /// Names of big states (kernel method).
    pub big_states: Vec<String>,
    /// `(stage, state, kernel nonempty)` per derivative piece.
    pub piece_kernels: Vec<(usize, String, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub ideal: Ideal,
    pub method: Method,
    pub diagnostics: Diagnostics,
    pub trace: Option<DerivativeTrace>,
}

/// Decides whether the projection of `s` is σ-I-small or contains an
/// I-positive closed set, and certifies the answer.
pub fn classify(s: &PairTree, ideal: &Ideal, method: Method) -> Result<Classification> {
    let (verdict, diagnostics, trace) = match method {
        Method::Kernel => {
            let (verdict, diagnostics) = classify_kernel(s, ideal)?;
            (verdict, diagnostics, None)
        }
        Method::Derivative => {
            if !ideal.is_fin() {
                return Err(Error::MethodMismatch);
            }
            let (verdict, diagnostics, trace) = classify_derivative(s)?;
            (verdict, diagnostics, Some(trace))
        }
    };
    self_check(&verdict, s, ideal)?;
    Ok(Classification {
        verdict,
        ideal: ideal.clone(),
        method,
        diagnostics,
        trace,
    })
}

fn classify_kernel(s: &PairTree, ideal: &Ideal) -> Result<(Verdict, Diagnostics)> {
    let Ok(pruned) = s.prune() else {
        let scheme = build_cover(s, ideal, None)?;
        return Ok((Verdict::SmallCover(scheme), Diagnostics::default()));
    };
    let stages = super::kernel::fixpoint_stages(&pruned, ideal);
    let big = big_states(&pruned, ideal);
    let diagnostics = Diagnostics {
        stage_counts: stages.iter().map(|st| st.iter().filter(|&&b| b).count()).collect(),
        big_states: big.iter().map(|&q| pruned.name(q).to_string()).collect(),
        ..Diagnostics::default()
    };
    let verdict = if big.contains(&pruned.start()) {
        Verdict::Positive(kernel_witness(&pruned, ideal)?)
    } else {
        Verdict::SmallCover(build_cover(&pruned, ideal, None)?)
    };
    Ok((verdict, diagnostics))
}

fn classify_derivative(s: &PairTree) -> Result<(Verdict, Diagnostics, DerivativeTrace)> {
    let trace = derive_sequence(s);
    let mut diagnostics = Diagnostics {
        stage_counts: trace.stages.iter().map(|st| st.len()).collect(),
        game_calls: trace.games.len(),
        ..Diagnostics::default()
    };
    if !trace.final_stage().is_empty() {
        return Err(Error::InternalSoundness(
            "derivative fixpoint is nonempty although every section projection of a \
             finite-state presentation is closed"
                .into(),
        ));
    }
    let fin = Ideal::fin();
    let mut any_positive = false;
    for (alpha, q) in trace.pieces() {
        let stage_section = trace.tree.restrict_from(
            &(0..trace.tree.len())
                .map(|p| trace.stages[alpha].contains(&p))
                .collect::<Vec<_>>(),
            q,
        );
        let positive = positive_kernel(&stage_section.project()?, &fin).positive;
        any_positive |= positive;
        diagnostics
            .piece_kernels
            .push((alpha, trace.tree.name(q).to_string(), positive));
    }
    let verdict = if any_positive {
        Verdict::Positive(derivative_witness(&trace)?)
    } else {
        Verdict::SmallCover(build_cover(s, &fin, Some(&trace))?)
    };
    Ok((verdict, diagnostics, trace))
}

fn self_check(verdict: &Verdict, s: &PairTree, ideal: &Ideal) -> Result<()> {
    let (depth, bound, nmax) = SELF_CHECK;
    let report = match verdict {
        Verdict::Positive(w) => crate::witness::positive::verify_witness_at(w, s, ideal, depth, bound),
        Verdict::SmallCover(scheme) => verify_cover(scheme, depth, bound, nmax),
    };
    if report.accepted() {
        Ok(())
    } else {
        Err(Error::InternalSoundness(format!(
            "certificate failed verification: {}",
            report.failures().join("; ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epset::EPSet;
    use crate::ntree::fixtures::*;
    use crate::pairtree::fixtures::*;
    use crate::witness::{cover_tree, verify_witness};

    fn evens() -> Ideal {
        Ideal::dilute(EPSet::from_class(class(0, 2, 0))).unwrap()
    }

    #[test]
    fn documented_examples() {
        let c = classify(&diag(), &Ideal::fin(), Method::Kernel).unwrap();
        assert!(c.verdict.is_positive());
        for method in [Method::Kernel, Method::Derivative] {
            let c = classify(&comb().pairize(), &Ideal::fin(), method).unwrap();
            let Verdict::SmallCover(scheme) = c.verdict else {
                panic!("COMB is σ-compact")
            };
            for n in 0..=8 {
                assert!(cover_tree(&scheme, n).is_compact_tree());
            }
        }
        let c = classify(&evpair(), &evens(), Method::Kernel).unwrap();
        assert!(!c.verdict.is_positive());
    }

    #[test]
    fn derivative_requires_fin() {
        assert_eq!(
            classify(&evpair(), &evens(), Method::Derivative),
            Err(Error::MethodMismatch)
        );
    }

    #[test]
    fn methods_agree_on_fixtures() {
        for s in [diag(), evpair(), half(), comb().pairize(), bin().pairize(), full().pairize()] {
            let k = classify(&s, &Ideal::fin(), Method::Kernel).unwrap();
            let d = classify(&s, &Ideal::fin(), Method::Derivative).unwrap();
            assert_eq!(k.verdict.is_positive(), d.verdict.is_positive());
        }
    }

    #[test]
    fn empty_projection_is_small() {
        let c = classify(&PairTree::empty(), &Ideal::fin(), Method::Kernel).unwrap();
        assert!(!c.verdict.is_positive());
    }

    #[test]
    fn unused_letters_do_not_matter() {
        assert!(verify_witness(
            &kernel_witness(&diag(), &Ideal::fin()).unwrap(),
            &diag(),
            &Ideal::fin()
        )
        .accepted());
    }
}
