//! Containment `[T1] ⊆ proj [S]` as a game between a spoiler choosing
//! x-letters inside `T1` and a duplicator tracking the set of `S`-states
//! that can match them.
//!
//! The duplicator's move is forced (the subset update), so the game reduces
//! to a search of the reachable positions for one where some legal letter
//! empties the subset. Because `S` has finitely many states, a nonempty
//! subset at every finite stage already guarantees an infinite matching run.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::epset::Frame;
use crate::error::Error;
use crate::ntree::{NTree, StateId};
use crate::pairtree::PairTree;
use crate::point::EPPoint;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameResult {
    pub contained: bool,
    /// A point of `[T1]` outside `proj [S]`; present iff not contained.
    pub counterexample: Option<EPPoint>,
    /// Number of positions the search visited.
    pub positions: usize,
}

type Position = (StateId, BTreeSet<StateId>);

/// Least-letter walk in a pruned tree from `q` until a state repeats, as an
/// eventually periodic continuation.
fn least_walk(t: &NTree, mut q: StateId, mut prefix: Vec<u64>) -> EPPoint {
    let mut seen: BTreeMap<StateId, usize> = BTreeMap::new();
    let mut letters = Vec::new();
    loop {
        if let Some(&i) = seen.get(&q) {
            prefix.extend_from_slice(&letters[..i]);
            let period = letters[i..].to_vec();
            return EPPoint::new(prefix, period).expect("cycle is nonempty");
        }
        seen.insert(q, letters.len());
        let a = t
            .state(q)
            .successor_letters()
            .min()
            .expect("pruned state has a successor");
        letters.push(a);
        q = t.step(q, a).unwrap();
    }
}

/// Decides `[T1] ⊆ proj [S]` and, when it fails, produces a counterexample
/// point of `[T1] \ proj [S]`.
pub fn closure_contained(t1: &NTree, s: &PairTree) -> GameResult {
    let t1 = match t1.prune() {
        Ok(t) => t,
        Err(Error::EmptyTree) => {
            return GameResult {
                contained: true,
                counterexample: None,
                positions: 0,
            }
        }
        Err(e) => unreachable!("prune only fails with EmptyTree: {e}"),
    };
    let s = match s.prune() {
        Ok(s) => s,
        Err(_) => {
            return GameResult {
                contained: false,
                counterexample: Some(least_walk(&t1, t1.start(), Vec::new())),
                positions: 1,
            }
        }
    };

    let root: Position = (t1.start(), BTreeSet::from([s.start()]));
    let mut index: BTreeMap<Position, usize> = BTreeMap::new();
    // parent position and the letter that led here
    let mut parent: Vec<Option<(usize, u64)>> = vec![None];
    let mut order: Vec<Position> = vec![root.clone()];
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        let (tq, subset) = order[id].clone();
        let mut frame = Frame::default();
        frame.absorb_set(&t1.state(tq).successor_letters());
        for &q in &subset {
            for (r, _) in &s.state(q).rules {
                r.absorb_x(&mut frame);
            }
        }
        for cell in frame.cells() {
            let a = cell.representative();
            let Some(tnext) = t1.step(tq, a) else {
                continue;
            };
            let next: BTreeSet<StateId> =
                subset.iter().flat_map(|&q| s.x_targets(q, a)).collect();
            if next.is_empty() {
                let mut path = vec![a];
                let mut cur = id;
                while let Some((p, letter)) = parent[cur] {
                    path.push(letter);
                    cur = p;
                }
                path.reverse();
                return GameResult {
                    contained: false,
                    counterexample: Some(least_walk(&t1, tnext, path)),
                    positions: order.len(),
                };
            }
            let pos = (tnext, next);
            if !index.contains_key(&pos) {
                index.insert(pos.clone(), order.len());
                order.push(pos);
                parent.push(Some((id, a)));
                queue.push_back(order.len() - 1);
            }
        }
    }
    GameResult {
        contained: true,
        counterexample: None,
        positions: order.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntree::fixtures::*;
    use crate::pairtree::fixtures::*;

    #[test]
    fn containment_examples() {
        assert!(closure_contained(&bin(), &diag()).contained);

        let r = closure_contained(&full(), &half());
        assert!(!r.contained);
        let x = r.counterexample.unwrap();
        assert_eq!(x.to_string(), "1,(0)");
        assert!(full().branch_member(&x));
        assert!(!half().has_first_coordinate(&x.take(2)));

        // HALF constrains only x(0), which EVEN keeps even
        assert!(closure_contained(&even(), &half()).contained);
    }

    #[test]
    fn empty_inputs() {
        assert!(closure_contained(&NTree::empty(), &half()).contained);
        let r = closure_contained(&bin(), &PairTree::empty());
        assert!(!r.contained);
        assert!(bin().branch_member(&r.counterexample.unwrap()));
    }

    #[test]
    fn counterexample_escapes_at_depth() {
        // S accepts only x with x(1) = 0
        let s = crate::pairtree::PairTreeBuilder::new()
            .state("a")
            .state("b")
            .state("c")
            .start("a")
            .xtail("a", class(0, 1, 0), 0, "b")
            .edge("b", 0, 0, "c")
            .dtail("c", class(0, 1, 0), "c")
            .build()
            .unwrap();
        let r = closure_contained(&bin(), &s);
        assert_eq!(r.counterexample.unwrap().to_string(), "0,1,(0)");
        assert!(closure_contained(&comb(), &s).contained);
    }
}
