//! Finite-state presentations of trees on ℕ.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::Ratio;

use crate::epset::{lcm, ArithClass, EPSet};
use crate::error::{Error, Result};
use crate::point::EPPoint;

pub type StateId = usize;

/// Ceiling on the lcm of all moduli inside one presentation.
pub const MAX_PRESENTATION_MODULUS: u64 = 4096;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NState {
    pub edges: BTreeMap<u64, StateId>,
    pub tails: Vec<(ArithClass, StateId)>,
}

impl NState {
    pub fn step(&self, letter: u64) -> Option<StateId> {
        self.edges.get(&letter).copied().or_else(|| {
            self.tails
                .iter()
                .find(|(c, _)| c.contains(letter))
                .map(|&(_, t)| t)
        })
    }

    pub fn targets(&self) -> impl Iterator<Item = StateId> + '_ {
        self.edges
            .values()
            .copied()
            .chain(self.tails.iter().map(|&(_, t)| t))
    }

    /// Letters whose target satisfies `keep`.
    pub fn family_into(&self, keep: impl Fn(StateId) -> bool) -> EPSet {
        let mut out = EPSet::empty();
        for (&a, &t) in &self.edges {
            if keep(t) {
                out.insert(a);
            }
        }
        for &(c, t) in &self.tails {
            if keep(t) {
                out.insert_class(c);
            }
        }
        out
    }

    pub fn successor_letters(&self) -> EPSet {
        self.family_into(|_| true)
    }
}

/// A deterministic presentation of a tree `T ⊆ ℕ^{<ω}`: a string is in `T`
/// iff the run from the start state consumes all of it.
///
/// Every state is reachable from the start; letter rules at one state are
/// pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NTree {
    names: Vec<String>,
    start: StateId,
    states: Vec<NState>,
}

impl NTree {
    /// Validates and keeps only the states reachable from `start`,
    /// renumbering them in their original relative order.
    pub fn from_parts(names: Vec<String>, start: StateId, states: Vec<NState>) -> Result<Self> {
        if names.len() != states.len() {
            return Err(Error::Validation("state names and bodies differ in count".into()));
        }
        if start >= states.len() {
            return Err(Error::Validation("start state out of range".into()));
        }
        let mut modulus = 1;
        for (q, st) in states.iter().enumerate() {
            for t in st.targets() {
                if t >= states.len() {
                    return Err(Error::Validation(format!(
                        "state {} has a move to an undefined state",
                        names[q]
                    )));
                }
            }
            for (i, (c, _)) in st.tails.iter().enumerate() {
                modulus = lcm(modulus, c.modulus()).min(MAX_PRESENTATION_MODULUS + 1);
                if let Some(a) = st.edges.keys().find(|&&a| c.contains(a)) {
                    return Err(Error::Validation(format!(
                        "state {}: letter {a} is claimed by an edge and by tail [{c}]",
                        names[q]
                    )));
                }
                if let Some((d, _)) = st.tails[..i].iter().find(|(d, _)| d.intersects(c)) {
                    return Err(Error::Validation(format!(
                        "state {}: tails [{d}] and [{c}] overlap",
                        names[q]
                    )));
                }
            }
        }
        if modulus > MAX_PRESENTATION_MODULUS {
            return Err(Error::Validation(format!(
                "lcm of tail moduli exceeds {MAX_PRESENTATION_MODULUS}"
            )));
        }
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for n in &names {
            if seen.insert(n.as_str(), ()).is_some() {
                return Err(Error::Validation(format!("duplicate state name {n}")));
            }
        }
        let tree = NTree {
            names,
            start,
            states,
        };
        let keep = tree.reachable_from(start);
        Ok(tree.restrict_unchecked(&keep))
    }

    /// The tree with no infinite branch: a start state with no moves.
    pub fn empty() -> Self {
        NTree {
            names: vec!["dead".into()],
            start: 0,
            states: vec![NState::default()],
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn id_of(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn states(&self) -> &[NState] {
        &self.states
    }

    pub fn state(&self, q: StateId) -> &NState {
        &self.states[q]
    }

    /// Lcm of all tail moduli.
    pub fn modulus(&self) -> u64 {
        self.states
            .iter()
            .flat_map(|s| s.tails.iter().map(|(c, _)| c.modulus()))
            .fold(1, lcm)
    }

    pub(crate) fn reachable_from(&self, q: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([q]);
        seen[q] = true;
        while let Some(p) = queue.pop_front() {
            for t in self.states[p].targets() {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// Drops states outside `keep` and moves into them, then restricts to
    /// what stays reachable. `keep[start]` must hold.
    fn restrict_unchecked(&self, keep: &[bool]) -> NTree {
        let mut new_id = vec![usize::MAX; self.states.len()];
        let mut kept = Vec::new();
        for q in 0..self.states.len() {
            if keep[q] {
                new_id[q] = kept.len();
                kept.push(q);
            }
        }
        let states = kept
            .iter()
            .map(|&q| {
                let st = &self.states[q];
                NState {
                    edges: st
                        .edges
                        .iter()
                        .filter(|(_, &t)| keep[t])
                        .map(|(&a, &t)| (a, new_id[t]))
                        .collect(),
                    tails: st
                        .tails
                        .iter()
                        .filter(|(_, t)| keep[*t])
                        .map(|&(c, t)| (c, new_id[t]))
                        .collect(),
                }
            })
            .collect();
        let names = kept.iter().map(|&q| self.names[q].clone()).collect();
        let restricted = NTree {
            names,
            start: new_id[self.start],
            states,
        };
        let reach = restricted.reachable_from(restricted.start);
        if reach.iter().all(|&r| r) {
            restricted
        } else {
            restricted.restrict_unchecked(&reach)
        }
    }

    pub fn step(&self, q: StateId, letter: u64) -> Option<StateId> {
        self.states[q].step(letter)
    }

    /// State reached by consuming `s`, if the run survives.
    pub fn run(&self, s: &[u64]) -> Option<StateId> {
        s.iter()
            .try_fold(self.start, |q, &a| self.states[q].step(a))
    }

    pub fn contains_string(&self, s: &[u64]) -> bool {
        self.run(s).is_some()
    }

    /// `Succ_T(s) = {n : s⌢n ∈ T}`.
    pub fn successor_set(&self, s: &[u64]) -> Result<EPSet> {
        let q = self.run(s).ok_or(Error::NotInTree)?;
        Ok(self.states[q].successor_letters())
    }

    /// States with an infinite path, i.e. that reach a cycle.
    pub fn live_states(&self) -> Vec<bool> {
        let mut live = vec![true; self.states.len()];
        loop {
            let mut changed = false;
            for q in 0..self.states.len() {
                if live[q] && !self.states[q].targets().any(|t| live[t]) {
                    live[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    pub fn is_pruned(&self) -> bool {
        self.live_states().iter().all(|&l| l)
    }

    /// Largest pruned subtree; `[T]` is unchanged.
    pub fn prune(&self) -> Result<NTree> {
        let live = self.live_states();
        if !live[self.start] {
            return Err(Error::EmptyTree);
        }
        Ok(self.restrict_unchecked(&live))
    }

    /// `x ∈ [T]`: runs `x` until (state, position) repeats.
    pub fn branch_member(&self, x: &EPPoint) -> bool {
        let mut seen = BTreeSet::new();
        let mut q = self.start;
        let mut pos = 0;
        loop {
            if pos >= x.prefix().len() && !seen.insert((q, pos)) {
                return true;
            }
            match self.states[q].step(x.letter_at_position(pos)) {
                Some(t) => q = t,
                None => return false,
            }
            pos = x.next_position(pos);
        }
    }

    /// `(stem, diam)`; the stem is absent and the diameter zero when `[T]` is
    /// a single point. Prunes first.
    pub fn stem_and_diam(&self) -> Result<(Option<Vec<u64>>, Ratio<u64>)> {
        let t = self.prune()?;
        let mut q = t.start;
        let mut stem = Vec::new();
        let mut visited = BTreeSet::new();
        loop {
            let fam = t.states[q].successor_letters();
            if fam.has_two() {
                let diam = Ratio::new(1, 1 + stem.len() as u64);
                return Ok((Some(stem), diam));
            }
            if !visited.insert(q) {
                return Ok((None, Ratio::from_integer(0)));
            }
            let (&a, &next) = t.states[q]
                .edges
                .iter()
                .next()
                .expect("pruned state has a successor");
            stem.push(a);
            q = next;
        }
    }

    /// Number of proper prefixes of `s` that are branching points.
    pub fn branching_height(&self, s: &[u64]) -> Result<usize> {
        let mut q = self.start;
        let mut count = 0;
        for &a in s {
            if self.states[q].successor_letters().has_two() {
                count += 1;
            }
            q = self.states[q].step(a).ok_or(Error::NotInTree)?;
        }
        Ok(count)
    }

    /// Pruned, nonempty, and every successor family finite.
    pub fn is_compact_tree(&self) -> bool {
        self.is_pruned() && self.states.iter().all(|s| s.tails.is_empty())
    }

    /// Every state reaches a state with at least two successor letters.
    pub fn is_perfect_tree(&self) -> bool {
        let branching: Vec<bool> = self
            .states
            .iter()
            .map(|s| s.successor_letters().has_two())
            .collect();
        self.states_reaching(&branching).iter().all(|&r| r)
    }

    /// States from which some state in `goal` is reachable in zero or more
    /// steps.
    pub fn states_reaching(&self, goal: &[bool]) -> Vec<bool> {
        let mut reach = goal.to_vec();
        loop {
            let mut changed = false;
            for q in 0..self.states.len() {
                if !reach[q] && self.states[q].targets().any(|t| reach[t]) {
                    reach[q] = true;
                    changed = true;
                }
            }
            if !changed {
                return reach;
            }
        }
    }
}

/// Builds an [`NTree`] from named states.
#[derive(Debug, Default)]
pub struct NTreeBuilder {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    start: Option<String>,
    edges: Vec<(String, u64, String)>,
    tails: Vec<(String, ArithClass, String)>,
}

impl NTreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: &str) -> &mut Self {
        if !self.index.contains_key(name) {
            self.index.insert(name.to_string(), self.names.len());
            self.names.push(name.to_string());
        }
        self
    }

    pub fn start(&mut self, name: &str) -> &mut Self {
        self.start = Some(name.to_string());
        self
    }

    pub fn edge(&mut self, from: &str, letter: u64, to: &str) -> &mut Self {
        self.edges.push((from.into(), letter, to.into()));
        self
    }

    pub fn tail(&mut self, from: &str, class: ArithClass, to: &str) -> &mut Self {
        self.tails.push((from.into(), class, to.into()));
        self
    }

    fn resolve(&self, name: &str) -> Result<StateId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Validation(format!("unknown state {name}")))
    }

    pub fn build(&self) -> Result<NTree> {
        let start = self
            .start
            .as_deref()
            .ok_or_else(|| Error::Validation("missing start state".into()))?;
        let start = self.resolve(start)?;
        let mut states = vec![NState::default(); self.names.len()];
        for (from, a, to) in &self.edges {
            let (p, t) = (self.resolve(from)?, self.resolve(to)?);
            if states[p].edges.insert(*a, t).is_some() {
                return Err(Error::Validation(format!(
                    "state {from}: letter {a} has two edges"
                )));
            }
        }
        for (from, c, to) in &self.tails {
            let (p, t) = (self.resolve(from)?, self.resolve(to)?);
            states[p].tails.push((*c, t));
        }
        NTree::from_parts(self.names.clone(), start, states)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn class(k: u64, m: u64, r: u64) -> ArithClass {
        ArithClass::new(k, m, r).unwrap()
    }

    pub fn full() -> NTree {
        NTreeBuilder::new()
            .state("q")
            .start("q")
            .tail("q", class(0, 1, 0), "q")
            .build()
            .unwrap()
    }

    pub fn bin() -> NTree {
        NTreeBuilder::new()
            .state("b")
            .start("b")
            .edge("b", 0, "b")
            .edge("b", 1, "b")
            .build()
            .unwrap()
    }

    pub fn comb() -> NTree {
        NTreeBuilder::new()
            .state("c")
            .state("z")
            .start("c")
            .tail("c", class(0, 1, 0), "z")
            .edge("z", 0, "z")
            .build()
            .unwrap()
    }

    pub fn even() -> NTree {
        NTreeBuilder::new()
            .state("e")
            .start("e")
            .tail("e", class(0, 2, 0), "e")
            .build()
            .unwrap()
    }

    pub fn zeros() -> NTree {
        NTreeBuilder::new()
            .state("o")
            .start("o")
            .edge("o", 0, "o")
            .build()
            .unwrap()
    }
}
