//! The derivative sequence on pair-tree states: repeatedly discard states
//! whose section projection has its closure inside the original set, then
//! prune, until nothing changes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::game::{closure_contained, GameResult};
use crate::error::Error;
use crate::ntree::StateId;
use crate::pairtree::PairTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemovalReason {
    ClosureContained,
    Pruned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub state: StateId,
    pub reason: RemovalReason,
}

/// One containment test made while deriving.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameCall {
    pub stage: usize,
    pub state: StateId,
    pub result: GameResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeTrace {
    /// The pruned presentation all state ids refer to.
    pub tree: PairTree,
    /// `stages[0]` is every state; the last entry is the fixpoint.
    pub stages: Vec<BTreeSet<StateId>>,
    /// `removals[α]` lists what leaves between stage α and stage α+1.
    pub removals: Vec<Vec<Removal>>,
    pub lambda: usize,
    pub games: Vec<GameCall>,
}

impl DerivativeTrace {
    pub fn final_stage(&self) -> &BTreeSet<StateId> {
        self.stages.last().unwrap()
    }

    /// `(stage, state)` for every state removed by the containment test.
    pub fn pieces(&self) -> Vec<(usize, StateId)> {
        self.removals
            .iter()
            .enumerate()
            .flat_map(|(alpha, rs)| {
                rs.iter()
                    .filter(|r| r.reason == RemovalReason::ClosureContained)
                    .map(move |r| (alpha, r.state))
            })
            .collect()
    }

    /// The stage-α presentation restricted to its surviving states, started
    /// at `q`.
    pub fn stage_tree_from(&self, alpha: usize, q: StateId) -> PairTree {
        let keep = mask(self.tree.len(), &self.stages[alpha]);
        self.tree.restrict_from(&keep, q)
    }
}

fn mask(n: usize, set: &BTreeSet<StateId>) -> Vec<bool> {
    (0..n).map(|q| set.contains(&q)).collect()
}

/// States with an infinite path inside `keep` that are reachable from the
/// start through such states; empty when the start does not qualify.
fn prune_within(tree: &PairTree, keep: &[bool]) -> BTreeSet<StateId> {
    let n = tree.len();
    let mut live = keep.to_vec();
    loop {
        let mut changed = false;
        for q in 0..n {
            if live[q] && !tree.state(q).targets().any(|t| live[t]) {
                live[q] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !live[tree.start()] {
        return BTreeSet::new();
    }
    let mut seen = BTreeSet::from([tree.start()]);
    let mut stack = vec![tree.start()];
    while let Some(p) = stack.pop() {
        for t in tree.state(p).targets() {
            if live[t] && seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen
}

/// Runs the derivative sequence on the pruned presentation of `s`. Every
/// containment test compares against the original presentation started at
/// the same state.
pub fn derive_sequence(s: &PairTree) -> DerivativeTrace {
    let tree = match s.prune() {
        Ok(t) => t,
        Err(Error::EmptyTree) => {
            return DerivativeTrace {
                tree: PairTree::empty(),
                stages: vec![BTreeSet::new()],
                removals: Vec::new(),
                lambda: 0,
                games: Vec::new(),
            }
        }
        Err(e) => unreachable!("prune only fails with EmptyTree: {e}"),
    };
    let n = tree.len();
    let mut stages = vec![(0..n).collect::<BTreeSet<StateId>>()];
    let mut removals = Vec::new();
    let mut games = Vec::new();
    loop {
        let alpha = stages.len() - 1;
        let current = stages[alpha].clone();
        let keep = mask(n, &current);
        let mut removed = Vec::new();
        let mut survivors = keep.clone();
        for &q in &current {
            let section = tree.restrict_from(&keep, q);
            let projected = section.project().expect("stage states are live");
            let result = closure_contained(&projected, &tree.rerooted(q));
            if result.contained {
                survivors[q] = false;
                removed.push(Removal {
                    state: q,
                    reason: RemovalReason::ClosureContained,
                });
            }
            games.push(GameCall {
                stage: alpha,
                state: q,
                result,
            });
        }
        let next = prune_within(&tree, &survivors);
        for &q in &current {
            if survivors[q] && !next.contains(&q) {
                removed.push(Removal {
                    state: q,
                    reason: RemovalReason::Pruned,
                });
            }
        }
        if next == current {
            return DerivativeTrace {
                tree,
                stages,
                removals,
                lambda: alpha,
                games,
            };
        }
        removals.push(removed);
        stages.push(next);
    }
}
