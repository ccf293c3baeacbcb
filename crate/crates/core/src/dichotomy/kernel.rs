//! Greatest fixpoints of the positivity operators on automaton states.
//!
//! Both operators have the same shape: a state survives when it reaches a
//! state whose letter family, restricted to moves into the current set, is
//! not a member of the ideal. For an [`NTree`] the family is the successor
//! family; for a [`PairTree`] it is the family of x-letters.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::epset::EPSet;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::ideal::Ideal;
use crate::ntree::{NTree, StateId};
use crate::pairtree::PairTree;

/// State-level view shared by both tree kinds.
pub trait StateGraph {
    fn state_count(&self) -> usize;
    fn successors(&self, q: StateId) -> Vec<StateId>;
    /// Letters (x-letters for pair trees) of moves at `q` into `into`.
    fn family_into(&self, q: StateId, into: &[bool]) -> EPSet;
    fn start_state(&self) -> StateId;
}

impl StateGraph for NTree {
    fn state_count(&self) -> usize {
        self.len()
    }

    fn successors(&self, q: StateId) -> Vec<StateId> {
        self.state(q).targets().collect()
    }

    fn family_into(&self, q: StateId, into: &[bool]) -> EPSet {
        self.state(q).family_into(|t| into[t])
    }

    fn start_state(&self) -> StateId {
        self.start()
    }
}

impl StateGraph for PairTree {
    fn state_count(&self) -> usize {
        self.len()
    }

    fn successors(&self, q: StateId) -> Vec<StateId> {
        self.state(q).targets().collect()
    }

    fn family_into(&self, q: StateId, into: &[bool]) -> EPSet {
        self.state(q).x_family_into(|t| into[t])
    }

    fn start_state(&self) -> StateId {
        self.start()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelResult {
    pub kernel: BTreeSet<StateId>,
    pub positive: bool,
}

impl KernelResult {
    fn from_mask<G: StateGraph>(g: &G, mask: &[bool]) -> Self {
        KernelResult {
            kernel: (0..mask.len()).filter(|&q| mask[q]).collect(),
            positive: mask[g.start_state()],
        }
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        (0..n).map(|q| self.kernel.contains(&q)).collect()
    }
}

fn reaching<G: StateGraph>(g: &G, goal: &[bool]) -> Vec<bool> {
    let mut reach = goal.to_vec();
    loop {
        let mut changed = false;
        for q in 0..g.state_count() {
            if !reach[q] && g.successors(q).iter().any(|&t| reach[t]) {
                reach[q] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// One application of the positivity operator to `x`.
pub fn positivity_step<G: StateGraph>(g: &G, ideal: &Ideal, x: &[bool]) -> Vec<bool> {
    let large: Vec<bool> = (0..g.state_count())
        .map(|p| !ideal.contains(&g.family_into(p, x)))
        .collect();
    reaching(g, &large)
}

/// The decreasing iteration from the full state set down to the greatest
/// fixpoint; the last entry is the fixpoint.
pub fn fixpoint_stages<G: StateGraph>(g: &G, ideal: &Ideal) -> Vec<Vec<bool>> {
    let mut stages = vec![vec![true; g.state_count()]];
    loop {
        let cur = stages.last().unwrap();
        let next = positivity_step(g, ideal, cur);
        if &next == cur {
            return stages;
        }
        stages.push(next);
    }
}

/// Stage at which each state leaves the iteration; fixpoint states get the
/// number of stages. Along any move the rank never increases.
pub fn removal_ranks<G: StateGraph>(g: &G, ideal: &Ideal) -> Vec<usize> {
    let stages = fixpoint_stages(g, ideal);
    (0..g.state_count())
        .map(|q| {
            stages
                .iter()
                .position(|s| !s[q])
                .map_or(stages.len(), |i| i - 1)
        })
        .collect()
}

/// I-positivity kernel of an [`NTree`]. A nonempty kernel containing the
/// start yields an I-positive subtree.
pub fn positive_kernel(t: &NTree, ideal: &Ideal) -> KernelResult {
    let stages = fixpoint_stages(t, ideal);
    KernelResult::from_mask(t, stages.last().unwrap())
}

/// The state-level surrogate for nodes whose section projection is not
/// σ-I-small.
pub fn big_states(s: &PairTree, ideal: &Ideal) -> BTreeSet<StateId> {
    let stages = fixpoint_stages(s, ideal);
    let last = stages.last().unwrap();
    (0..s.len()).filter(|&q| last[q]).collect()
}

pub const DEFAULT_ORACLE_BOUND: usize = 12;

/// [`positive_kernel`] recomputed by checking every subset `X` of states for
/// `X ⊆ Φ(X)` and taking the union of those that pass.
pub fn kernel_oracle(t: &NTree, ideal: &Ideal) -> Result<KernelResult> {
    kernel_oracle_with(t, ideal, DEFAULT_ORACLE_BOUND, Exec::default())
}

pub fn kernel_oracle_with<G: StateGraph + Sync>(
    g: &G,
    ideal: &Ideal,
    bound: usize,
    exec: Exec,
) -> Result<KernelResult> {
    let n = g.state_count();
    if n > bound {
        return Err(Error::BoundsTooLarge(format!(
            "{n} states exceed the subset-enumeration bound {bound}"
        )));
    }
    let succ: Vec<Vec<StateId>> = (0..n).map(|q| g.successors(q)).collect();
    let masks: Vec<u32> = (0..(1u32 << n)).collect();
    let post_fixpoints = exec::filter_map(exec, &masks, |&m| {
        let x: Vec<bool> = (0..n).map(|q| m >> q & 1 == 1).collect();
        let large: Vec<bool> = (0..n)
            .map(|p| !ideal.contains(&g.family_into(p, &x)))
            .collect();
        let closed = (0..n).filter(|&q| x[q]).all(|q| {
            // depth-first search for a large state reachable from q
            let mut seen = vec![false; n];
            let mut stack = vec![q];
            seen[q] = true;
            while let Some(p) = stack.pop() {
                if large[p] {
                    return true;
                }
                for &t in &succ[p] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            false
        });
        closed.then_some(m)
    });
    let union = post_fixpoints.into_iter().fold(0u32, |a, m| a | m);
    let mask: Vec<bool> = (0..n).map(|q| union >> q & 1 == 1).collect();
    Ok(KernelResult::from_mask(g, &mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epset::ArithClass;
    use crate::ntree::fixtures::*;
    use crate::pairtree::fixtures::*;

    fn evens() -> Ideal {
        Ideal::dilute(EPSet::from_class(ArithClass::new(0, 2, 0).unwrap())).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let fin = Ideal::fin();
        let k = positive_kernel(&full(), &fin);
        assert!(k.positive);
        assert_eq!(k.kernel, BTreeSet::from([0]));
        let k = positive_kernel(&comb(), &fin);
        assert!(!k.positive);
        assert!(k.kernel.is_empty());
        assert!(!positive_kernel(&even(), &evens()).positive);
        assert!(positive_kernel(&even(), &fin).positive);
        for (t, i) in [
            (full(), fin.clone()),
            (comb(), fin.clone()),
            (even(), evens()),
            (even(), fin.clone()),
        ] {
            assert_eq!(positive_kernel(&t, &i), kernel_oracle(&t, &i).unwrap());
        }
    }

    #[test]
    fn oracle_handles_the_empty_tree() {
        let k = kernel_oracle(&NTree::empty(), &Ideal::fin()).unwrap();
        assert!(k.kernel.is_empty());
        assert!(!k.positive);
    }

    #[test]
    fn big_state_examples() {
        let fin = Ideal::fin();
        assert_eq!(big_states(&diag(), &fin), BTreeSet::from([0]));
        assert_eq!(big_states(&evpair(), &fin), BTreeSet::from([0]));
        assert!(big_states(&evpair(), &evens()).is_empty());
        assert!(big_states(&comb().pairize(), &fin).is_empty());
        for (s, i) in [
            (diag(), fin.clone()),
            (evpair(), fin.clone()),
            (evpair(), evens()),
            (comb().pairize(), fin.clone()),
            (half(), fin.clone()),
        ] {
            let oracle = kernel_oracle_with(&s, &i, 12, Exec::Sequential).unwrap();
            assert_eq!(big_states(&s, &i), oracle.kernel);
        }
    }

    #[test]
    fn kernel_is_a_certified_fixpoint() {
        for (t, i) in [(full(), Ideal::fin()), (comb(), Ideal::fin()), (even(), evens())] {
            let k = positive_kernel(&t, &i).mask(t.len());
            let step = positivity_step(&t, &i, &k);
            assert!((0..t.len()).all(|q| !k[q] || step[q]));
            for q in (0..t.len()).filter(|&q| !k[q]) {
                let mut bigger = k.clone();
                bigger[q] = true;
                assert!(!positivity_step(&t, &i, &bigger)[q]);
            }
        }
    }

    #[test]
    fn ranks_never_increase_along_moves() {
        let s = comb().pairize();
        let ranks = removal_ranks(&s, &Ideal::fin());
        assert_eq!(ranks, vec![1, 0]);
        for q in 0..s.len() {
            for t in s.successors(q) {
                assert!(ranks[t] <= ranks[q]);
            }
        }
    }

    #[test]
    fn oracle_rejects_large_inputs() {
        let r = kernel_oracle_with(&full(), &Ideal::fin(), 0, Exec::Sequential);
        assert!(matches!(r, Err(Error::BoundsTooLarge(_))));
    }
}
