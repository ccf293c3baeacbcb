//! Brute-force cross-checks of the engine against bounded enumerations.

use std::collections::BTreeSet;

use crate::dichotomy::kernel::{big_states, kernel_oracle_with, positive_kernel};
use crate::dichotomy::{classify, Method, Verdict};
use crate::error::Error;
use crate::exec::Exec;
use crate::ideal::Ideal;
use crate::ntree::NTree;
use crate::pairtree::{PairRule, PairTree};
use crate::snapshot::{Enumerable, DEFAULT_NODE_BUDGET};
use crate::witness::{verify_cover, Check, Report};

/// Largest presentation the subset-enumeration oracles accept here.
pub const ORACLE_STATE_BOUND: usize = 12;

/// `{0..bound}` plus `k, k+m, k+7m` for every class in a rule of `s`.
pub fn probe_letters(s: &PairTree, bound: u64) -> BTreeSet<u64> {
    let mut letters: BTreeSet<u64> = (0..=bound).collect();
    for st in s.states() {
        for (r, _) in &st.rules {
            let class = match *r {
                PairRule::Edge { .. } => None,
                PairRule::XTail { x, .. } => Some(x),
                PairRule::YTail { y, .. } => Some(y),
                PairRule::DTail(c) => Some(c),
            };
            if let Some(c) = class {
                let (k, m) = (c.first(), c.modulus());
                letters.extend([k, k + m, k + 7 * m]);
            }
        }
    }
    letters
}

/// Snapshot of `project(s)` against the first coordinates of `s`, over
/// [`probe_letters`].
pub fn projection_mismatches(s: &PairTree, depth: usize, bound: u64) -> Vec<String> {
    let letters = probe_letters(s, bound);
    let projected = match s.project() {
        Ok(t) => t,
        Err(Error::EmptyTree) => NTree::empty(),
        Err(e) => return vec![e.to_string()],
    };
    let (proj, firsts) = match (
        projected.snapshot_with_letters(depth, &letters, DEFAULT_NODE_BUDGET),
        s.first_coordinates(depth, &letters, DEFAULT_NODE_BUDGET),
    ) {
        (Ok(p), Ok(f)) => (p.members, f),
        (Err(e), _) | (_, Err(e)) => return vec![e.to_string()],
    };
    let extra = proj.difference(&firsts).map(|u| format!("{u:?} only in the projection"));
    let missing = firsts.difference(&proj).map(|u| format!("{u:?} missing from the projection"));
    extra.chain(missing).collect()
}

/// Every oracle check for one presentation under one ideal.
pub fn oracle_checks(
    s: &PairTree,
    ideal: &Ideal,
    depth: usize,
    bound: u64,
    nmax: u64,
    exec: Exec,
) -> Report {
    let mut checks = vec![Check::new("projection", projection_mismatches(s, depth, bound))];

    let projected = s.project().unwrap_or_else(|_| NTree::empty());
    let mut kernel = Vec::new();
    if projected.len() <= ORACLE_STATE_BOUND {
        let engine = positive_kernel(&projected, ideal);
        match kernel_oracle_with(&projected, ideal, ORACLE_STATE_BOUND, exec) {
            Ok(oracle) if oracle == engine => {}
            Ok(oracle) => kernel.push(format!(
                "projection kernel {:?} differs from enumeration {:?}",
                engine.kernel, oracle.kernel
            )),
            Err(e) => kernel.push(e.to_string()),
        }
    }
    if let Ok(pruned) = s.prune() {
        if pruned.len() <= ORACLE_STATE_BOUND {
            let engine = big_states(&pruned, ideal);
            match kernel_oracle_with(&pruned, ideal, ORACLE_STATE_BOUND, exec) {
                Ok(oracle) if oracle.kernel == engine => {}
                Ok(oracle) => kernel.push(format!(
                    "big states {engine:?} differ from enumeration {:?}",
                    oracle.kernel
                )),
                Err(e) => kernel.push(e.to_string()),
            }
        }
    }
    checks.push(Check::new("kernel", kernel));

    let certificate = match classify(s, ideal, Method::Kernel) {
        Ok(c) => match &c.verdict {
            Verdict::Positive(w) => {
                crate::witness::positive::verify_witness_at(w, s, ideal, depth, bound).failures()
            }
            Verdict::SmallCover(scheme) => verify_cover(scheme, depth, bound, nmax).failures(),
        },
        Err(e) => vec![e.to_string()],
    };
    checks.push(Check::new("certificate", certificate));
    Report { checks }
}
