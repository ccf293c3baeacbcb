//! Bounded explicit enumerations of trees: the substrate every brute-force
//! cross-check runs on.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ntree::{NTree, StateId};
use crate::pairtree::PairTree;

pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// All members of the pruned tree of length at most `depth` whose letters
/// lie in `letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTreeSnapshot<K: Ord> {
    pub depth: usize,
    pub letters: BTreeSet<u64>,
    pub members: BTreeSet<K>,
}

pub type StringSnapshot = FiniteTreeSnapshot<Vec<u64>>;
pub type PairSnapshot = FiniteTreeSnapshot<(Vec<u64>, Vec<u64>)>;

impl<K: Ord> FiniteTreeSnapshot<K> {
    pub fn contains(&self, k: &K) -> bool {
        self.members.contains(k)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn letter_bound(&self) -> Option<u64> {
        self.letters.iter().next_back().copied()
    }
}

impl StringSnapshot {
    pub fn is_prefix_closed(&self) -> bool {
        self.members
            .iter()
            .all(|s| s.is_empty() || self.members.contains(&s[..s.len() - 1]))
    }
}

impl PairSnapshot {
    pub fn first_coordinates(&self) -> BTreeSet<Vec<u64>> {
        self.members.iter().map(|(u, _)| u.clone()).collect()
    }

    pub fn is_prefix_closed(&self) -> bool {
        self.members.iter().all(|(u, v)| {
            u.is_empty() || self.members.contains(&(u[..u.len() - 1].to_vec(), v[..v.len() - 1].to_vec()))
        })
    }
}

/// Presentations that can be enumerated into a snapshot.
pub trait Enumerable {
    type Member: Ord;

    fn snapshot_with_letters(
        &self,
        depth: usize,
        letters: &BTreeSet<u64>,
        budget: usize,
    ) -> Result<FiniteTreeSnapshot<Self::Member>>;
}

fn over_budget(budget: usize) -> Error {
    Error::BoundsTooLarge(format!("snapshot exceeds {budget} nodes"))
}

impl Enumerable for NTree {
    type Member = Vec<u64>;

    fn snapshot_with_letters(
        &self,
        depth: usize,
        letters: &BTreeSet<u64>,
        budget: usize,
    ) -> Result<StringSnapshot> {
        let live = self.live_states();
        let mut members = BTreeSet::new();
        if live[self.start()] {
            members.insert(Vec::new());
            let mut frontier: Vec<(Vec<u64>, StateId)> = vec![(Vec::new(), self.start())];
            for _ in 0..depth {
                let mut next = Vec::new();
                for (s, q) in &frontier {
                    for &a in letters {
                        if let Some(t) = self.step(*q, a).filter(|&t| live[t]) {
                            let mut s2 = s.clone();
                            s2.push(a);
                            members.insert(s2.clone());
                            next.push((s2, t));
                            if members.len() > budget {
                                return Err(over_budget(budget));
                            }
                        }
                    }
                }
                frontier = next;
            }
        }
        Ok(FiniteTreeSnapshot {
            depth,
            letters: letters.clone(),
            members,
        })
    }
}

impl Enumerable for PairTree {
    type Member = (Vec<u64>, Vec<u64>);

    fn snapshot_with_letters(
        &self,
        depth: usize,
        letters: &BTreeSet<u64>,
        budget: usize,
    ) -> Result<PairSnapshot> {
        let live = self.live_states();
        let mut members = BTreeSet::new();
        if live[self.start()] {
            members.insert((Vec::new(), Vec::new()));
            let mut frontier = vec![(Vec::new(), Vec::new(), self.start())];
            for _ in 0..depth {
                let mut next = Vec::new();
                for (u, v, q) in &frontier {
                    for &a in letters {
                        for &b in letters {
                            if let Some(t) = self.state(*q).step_pair(a, b).filter(|&t| live[t]) {
                                let (mut u2, mut v2) = (u.clone(), v.clone());
                                u2.push(a);
                                v2.push(b);
                                members.insert((u2.clone(), v2.clone()));
                                next.push((u2, v2, t));
                                if members.len() > budget {
                                    return Err(over_budget(budget));
                                }
                            }
                        }
                    }
                }
                frontier = next;
            }
        }
        Ok(FiniteTreeSnapshot {
            depth,
            letters: letters.clone(),
            members,
        })
    }
}

pub fn letters_up_to(bound: u64) -> BTreeSet<u64> {
    (0..=bound).collect()
}

/// Members of length ≤ `depth` with letters ≤ `bound`, within the default
/// node budget.
pub fn truncate_enumerate<T: Enumerable>(
    obj: &T,
    depth: usize,
    bound: u64,
) -> Result<FiniteTreeSnapshot<T::Member>> {
    obj.snapshot_with_letters(depth, &letters_up_to(bound), DEFAULT_NODE_BUDGET)
}

impl PairTree {
    /// x-strings `u` of length ≤ `depth` over `letters` such that some `v`,
    /// with unrestricted letters, makes `(u, v)` a node of the pruned tree.
    /// Simulates every move individually; no subset construction.
    pub fn first_coordinates(
        &self,
        depth: usize,
        letters: &BTreeSet<u64>,
        budget: usize,
    ) -> Result<BTreeSet<Vec<u64>>> {
        let live = self.live_states();
        let mut out = BTreeSet::new();
        if !live[self.start()] {
            return Ok(out);
        }
        out.insert(Vec::new());
        let mut frontier: BTreeSet<(Vec<u64>, StateId)> =
            BTreeSet::from([(Vec::new(), self.start())]);
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for (u, q) in &frontier {
                for &a in letters {
                    for (rule, t) in &self.state(*q).rules {
                        if live[*t] && rule.applies_x(a) {
                            let mut u2 = u.clone();
                            u2.push(a);
                            out.insert(u2.clone());
                            next.insert((u2, *t));
                        }
                    }
                }
                if next.len() > budget {
                    return Err(over_budget(budget));
                }
            }
            frontier = next;
        }
        Ok(out)
    }

    /// Whether some `v` (letters unrestricted) puts `(u, v)` in the pruned
    /// tree; direct simulation of the state sets.
    pub fn has_first_coordinate(&self, u: &[u64]) -> bool {
        let live = self.live_states();
        if !live[self.start()] {
            return false;
        }
        let mut current = BTreeSet::from([self.start()]);
        for &a in u {
            current = current
                .iter()
                .flat_map(|&q| self.state(q).rules.iter())
                .filter(|(r, t)| live[*t] && r.applies_x(a))
                .map(|&(_, t)| t)
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntree::fixtures::*;
    use crate::pairtree::fixtures::*;

    #[test]
    fn enumerate_examples() {
        let s = truncate_enumerate(&full(), 2, 1).unwrap();
        let want: BTreeSet<Vec<u64>> = [
            vec![],
            vec![0],
            vec![1],
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![1, 1],
        ]
        .into_iter()
        .collect();
        assert_eq!(s.members, want);

        let s = truncate_enumerate(&comb(), 2, 2).unwrap();
        let want: BTreeSet<Vec<u64>> = [
            vec![],
            vec![0],
            vec![1],
            vec![2],
            vec![0, 0],
            vec![1, 0],
            vec![2, 0],
        ]
        .into_iter()
        .collect();
        assert_eq!(s.members, want);

        let dead = NTree::empty();
        assert!(truncate_enumerate(&dead, 3, 3).unwrap().is_empty());
        assert!(truncate_enumerate(&PairTree::empty(), 3, 3).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let r = full().snapshot_with_letters(6, &letters_up_to(9), 1000);
        assert!(matches!(r, Err(Error::BoundsTooLarge(_))));
    }

    #[test]
    fn pair_snapshots_are_prefix_closed() {
        for s in [diag(), evpair(), half()] {
            let snap = truncate_enumerate(&s, 3, 4).unwrap();
            assert!(snap.is_prefix_closed());
            let fc = s.first_coordinates(3, &letters_up_to(4), DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(snap.first_coordinates(), fc);
        }
    }

    #[test]
    fn first_coordinates_ignore_the_y_bound() {
        let s = crate::pairtree::PairTreeBuilder::new()
            .state("p")
            .start("p")
            .ytail("p", 1, class(20, 1, 0), "p")
            .build()
            .unwrap();
        let fc = s.first_coordinates(2, &letters_up_to(3), DEFAULT_NODE_BUDGET).unwrap();
        assert!(fc.contains(&vec![1, 1]));
        assert!(s.has_first_coordinate(&[1, 1, 1]));
        assert!(!s.has_first_coordinate(&[1, 2]));
    }
}
