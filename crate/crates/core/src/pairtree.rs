//! Finite-state presentations of trees on ℕ×ℕ, and projection.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::epset::{lcm, ArithClass, Cell, EPSet, Frame};
use crate::error::{Error, Result};
use crate::ntree::{NState, NTree, StateId, MAX_PRESENTATION_MODULUS};

/// A set of letter pairs consumed by one move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairRule {
    Edge { x: u64, y: u64 },
    /// Any x-letter in the class, fixed y-letter.
    XTail { x: ArithClass, y: u64 },
    /// Fixed x-letter, any y-letter in the class.
    YTail { x: u64, y: ArithClass },
    /// x-letter = y-letter, both in the class.
    DTail(ArithClass),
}

impl PairRule {
    pub fn applies(&self, x: u64, y: u64) -> bool {
        match *self {
            PairRule::Edge { x: a, y: b } => a == x && b == y,
            PairRule::XTail { x: c, y: b } => c.contains(x) && b == y,
            PairRule::YTail { x: a, y: c } => a == x && c.contains(y),
            PairRule::DTail(c) => c.contains(x) && x == y,
        }
    }

    pub fn applies_x(&self, x: u64) -> bool {
        match *self {
            PairRule::Edge { x: a, .. } | PairRule::YTail { x: a, .. } => a == x,
            PairRule::XTail { x: c, .. } | PairRule::DTail(c) => c.contains(x),
        }
    }

    pub fn x_letters(&self) -> EPSet {
        match *self {
            PairRule::Edge { x, .. } | PairRule::YTail { x, .. } => EPSet::from_letters([x]),
            PairRule::XTail { x, .. } | PairRule::DTail(x) => EPSet::from_class(x),
        }
    }

    /// y-letters matching x-letter `x` (empty when the rule does not apply).
    pub fn y_letters_for(&self, x: u64) -> EPSet {
        if !self.applies_x(x) {
            return EPSet::empty();
        }
        match *self {
            PairRule::Edge { y, .. } | PairRule::XTail { y, .. } => EPSet::from_letters([y]),
            PairRule::YTail { y, .. } => EPSet::from_class(y),
            PairRule::DTail(_) => EPSet::from_letters([x]),
        }
    }

    pub fn least_y(&self, x: u64) -> Option<u64> {
        self.y_letters_for(x).min()
    }

    pub fn absorb_x(&self, frame: &mut Frame) {
        match self {
            PairRule::Edge { x, .. } | PairRule::YTail { x, .. } => frame.absorb_letter(*x),
            PairRule::XTail { x, .. } | PairRule::DTail(x) => frame.absorb_class(x),
        }
    }

    pub fn absorb_y(&self, frame: &mut Frame) {
        match self {
            PairRule::Edge { y, .. } | PairRule::XTail { y, .. } => frame.absorb_letter(*y),
            PairRule::YTail { y, .. } | PairRule::DTail(y) => frame.absorb_class(y),
        }
    }

    fn classes(&self) -> Option<ArithClass> {
        match *self {
            PairRule::Edge { .. } => None,
            PairRule::XTail { x, .. } => Some(x),
            PairRule::YTail { y, .. } => Some(y),
            PairRule::DTail(c) => Some(c),
        }
    }

    /// Some pair is consumed by both rules.
    pub fn overlaps(&self, other: &PairRule) -> bool {
        use PairRule::*;
        match (*self, *other) {
            (Edge { x, y }, r) | (r, Edge { x, y }) => r.applies(x, y),
            (XTail { x: c, y: b }, XTail { x: d, y: b2 }) => b == b2 && c.intersects(&d),
            (XTail { x: c, y: b }, YTail { x: a, y: d })
            | (YTail { x: a, y: d }, XTail { x: c, y: b }) => c.contains(a) && d.contains(b),
            (XTail { x: c, y: b }, DTail(d)) | (DTail(d), XTail { x: c, y: b }) => {
                c.contains(b) && d.contains(b)
            }
            (YTail { x: a, y: c }, YTail { x: a2, y: d }) => a == a2 && c.intersects(&d),
            (YTail { x: a, y: c }, DTail(d)) | (DTail(d), YTail { x: a, y: c }) => {
                c.contains(a) && d.contains(a)
            }
            (DTail(c), DTail(d)) => c.intersects(&d),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairState {
    pub rules: Vec<(PairRule, StateId)>,
}

impl PairState {
    pub fn targets(&self) -> impl Iterator<Item = StateId> + '_ {
        self.rules.iter().map(|&(_, t)| t)
    }

    pub fn step_pair(&self, x: u64, y: u64) -> Option<StateId> {
        self.rules
            .iter()
            .find(|(r, _)| r.applies(x, y))
            .map(|&(_, t)| t)
    }

    /// x-letters of moves whose target satisfies `keep`.
    pub fn x_family_into(&self, keep: impl Fn(StateId) -> bool) -> EPSet {
        let mut out = EPSet::empty();
        for (r, t) in &self.rules {
            if keep(*t) {
                out.extend(&r.x_letters());
            }
        }
        out
    }
}

/// A pair-deterministic presentation of a tree `S ⊆ ℕ^{<ω}×ℕ^{<ω}` whose
/// members are pairs of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTree {
    names: Vec<String>,
    start: StateId,
    states: Vec<PairState>,
}

impl PairTree {
    /// Validates pair-determinism and keeps the states reachable from
    /// `start`.
    pub fn from_parts(names: Vec<String>, start: StateId, states: Vec<PairState>) -> Result<Self> {
        if names.len() != states.len() {
            return Err(Error::Validation("state names and bodies differ in count".into()));
        }
        if start >= states.len() {
            return Err(Error::Validation("start state out of range".into()));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Validation(format!("duplicate state name {n}")));
            }
        }
        let mut modulus = 1;
        for (q, st) in states.iter().enumerate() {
            for (i, (r, t)) in st.rules.iter().enumerate() {
                if *t >= states.len() {
                    return Err(Error::Validation(format!(
                        "state {} has a move to an undefined state",
                        names[q]
                    )));
                }
                if let Some(c) = r.classes() {
                    modulus = lcm(modulus, c.modulus()).min(MAX_PRESENTATION_MODULUS + 1);
                }
                if let Some((o, _)) = st.rules[..i].iter().find(|(o, _)| o.overlaps(r)) {
                    return Err(Error::Validation(format!(
                        "state {}: rules {o:?} and {r:?} overlap",
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
        let tree = PairTree {
            names,
            start,
            states,
        };
        let keep = tree.reachable_from(start);
        Ok(tree.restrict_unchecked(&keep, start))
    }

    pub fn empty() -> Self {
        PairTree {
            names: vec!["dead".into()],
            start: 0,
            states: vec![PairState::default()],
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

    pub fn states(&self) -> &[PairState] {
        &self.states
    }

    pub fn state(&self, q: StateId) -> &PairState {
        &self.states[q]
    }

    pub fn modulus(&self) -> u64 {
        self.states
            .iter()
            .flat_map(|s| s.rules.iter().filter_map(|(r, _)| r.classes()))
            .map(|c| c.modulus())
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

    fn restrict_unchecked(&self, keep: &[bool], start: StateId) -> PairTree {
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
            .map(|&q| PairState {
                rules: self.states[q]
                    .rules
                    .iter()
                    .filter(|(_, t)| keep[*t])
                    .map(|&(r, t)| (r, new_id[t]))
                    .collect(),
            })
            .collect();
        let restricted = PairTree {
            names: kept.iter().map(|&q| self.names[q].clone()).collect(),
            start: new_id[start],
            states,
        };
        let reach = restricted.reachable_from(restricted.start);
        if reach.iter().all(|&r| r) {
            restricted
        } else {
            restricted.restrict_unchecked(&reach, restricted.start)
        }
    }

    /// Keeps states in `keep` (which must contain the start) and drops moves
    /// leaving it.
    pub fn restrict(&self, keep: &[bool]) -> Option<PairTree> {
        keep[self.start].then(|| self.restrict_unchecked(keep, self.start))
    }

    /// Keeps states in `keep`, started at `start` (which must be kept).
    pub fn restrict_from(&self, keep: &[bool], start: StateId) -> PairTree {
        assert!(keep[start], "start state must be kept");
        self.restrict_unchecked(keep, start)
    }

    /// The same presentation started at `q`, restricted to what `q` reaches.
    pub fn rerooted(&self, q: StateId) -> PairTree {
        let keep = self.reachable_from(q);
        self.restrict_unchecked(&keep, q)
    }

    pub fn run_pair(&self, u: &[u64], v: &[u64]) -> Option<StateId> {
        if u.len() != v.len() {
            return None;
        }
        u.iter()
            .zip(v)
            .try_fold(self.start, |q, (&a, &b)| self.states[q].step_pair(a, b))
    }

    pub fn contains_pair(&self, u: &[u64], v: &[u64]) -> bool {
        self.run_pair(u, v).is_some()
    }

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

    pub fn prune(&self) -> Result<PairTree> {
        let live = self.live_states();
        if !live[self.start] {
            return Err(Error::EmptyTree);
        }
        Ok(self.restrict_unchecked(&live, self.start))
    }

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

    /// Targets of all moves at `q` whose x-letter is `x`.
    pub fn x_targets(&self, q: StateId, x: u64) -> impl Iterator<Item = StateId> + '_ {
        self.states[q]
            .rules
            .iter()
            .filter(move |(r, _)| r.applies_x(x))
            .map(|&(_, t)| t)
    }

    /// `tree(proj [S])` as a deterministic [`NTree`], by subset construction
    /// over the pruned presentation.
    pub fn project(&self) -> Result<NTree> {
        let pruned = self.prune()?;
        Ok(pruned.project_from(&BTreeSet::from([pruned.start])))
    }

    /// Subset construction from an initial set of live states. Within each
    /// subset, x-letters beyond the combined threshold are handled one
    /// residue class (modulo the lcm of the moduli in play) at a time.
    pub(crate) fn project_from(&self, init: &BTreeSet<StateId>) -> NTree {
        let mut index: BTreeMap<BTreeSet<StateId>, StateId> = BTreeMap::new();
        let mut order: Vec<BTreeSet<StateId>> = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(init.clone(), 0);
        order.push(init.clone());
        queue.push_back(0usize);
        let mut bodies: Vec<NState> = vec![NState::default()];
        while let Some(id) = queue.pop_front() {
            let subset = order[id].clone();
            let mut frame = Frame::default();
            for &q in &subset {
                for (r, _) in &self.states[q].rules {
                    r.absorb_x(&mut frame);
                }
            }
            // letters per target subset, in first-seen order
            let mut by_target: Vec<(StateId, EPSet)> = Vec::new();
            for cell in frame.cells() {
                let rep = cell.representative();
                let targets: BTreeSet<StateId> =
                    subset.iter().flat_map(|&q| self.x_targets(q, rep)).collect();
                if targets.is_empty() {
                    continue;
                }
                let tid = match index.get(&targets) {
                    Some(&t) => t,
                    None => {
                        let t = order.len();
                        index.insert(targets.clone(), t);
                        order.push(targets);
                        bodies.push(NState::default());
                        queue.push_back(t);
                        t
                    }
                };
                let slot = match by_target.iter().position(|(t, _)| *t == tid) {
                    Some(i) => i,
                    None => {
                        by_target.push((tid, EPSet::empty()));
                        by_target.len() - 1
                    }
                };
                match cell {
                    Cell::Letter(n) => by_target[slot].1.insert(n),
                    Cell::Class(c) => by_target[slot].1.insert_class(c),
                }
            }
            let body = &mut bodies[id];
            for (tid, letters) in by_target {
                let letters = letters.normalized();
                for &a in &letters.explicit {
                    body.edges.insert(a, tid);
                }
                for &c in &letters.classes {
                    body.tails.push((c, tid));
                }
            }
        }
        let names = subset_names(&order, &self.names);
        NTree::from_parts(names, 0, bodies).expect("subset construction yields a valid tree")
    }

    /// `S_uv`: the chain of single moves down to `(u, v)`, then the original
    /// behavior from the state reached there.
    pub fn pair_subtree(&self, u: &[u64], v: &[u64]) -> Result<PairTree> {
        self.pair_subtree_embedded(u, v).map(|(t, _)| t)
    }

    /// [`PairTree::pair_subtree`] together with the map from its state names
    /// to the state names of `self` they simulate.
    pub fn pair_subtree_embedded(
        &self,
        u: &[u64],
        v: &[u64],
    ) -> Result<(PairTree, BTreeMap<String, String>)> {
        let reached = self.run_pair(u, v).ok_or(Error::NotInTree)?;
        let identity = |t: &PairTree| {
            t.names
                .iter()
                .map(|n| (n.clone(), n.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        if u.is_empty() {
            return Ok((self.clone(), identity(self)));
        }
        let base = self.rerooted(reached);
        let taken: BTreeSet<&str> = self.names.iter().map(String::as_str).collect();
        let mut tag = String::from("~");
        let chain_names = loop {
            let candidate = (0..u.len()).map(|i| format!("{tag}{i}")).collect::<Vec<_>>();
            if candidate.iter().all(|n| !taken.contains(n.as_str())) {
                break candidate;
            }
            tag.push('~');
        };
        let n = u.len();
        let mut names = chain_names.clone();
        names.extend(base.names.iter().cloned());
        let mut states: Vec<PairState> = (0..n)
            .map(|i| {
                let next = if i + 1 < n { i + 1 } else { n + base.start };
                PairState {
                    rules: vec![(PairRule::Edge { x: u[i], y: v[i] }, next)],
                }
            })
            .collect();
        states.extend(base.states.iter().map(|st| PairState {
            rules: st.rules.iter().map(|&(r, t)| (r, t + n)).collect(),
        }));
        let tree = PairTree::from_parts(names, 0, states)?;
        let mut embedding = BTreeMap::new();
        let mut q = self.start;
        for (i, name) in chain_names.into_iter().enumerate() {
            embedding.insert(name, self.names[q].clone());
            q = self.states[q].step_pair(u[i], v[i]).expect("run exists");
        }
        for name in &base.names {
            embedding.insert(name.clone(), name.clone());
        }
        Ok((tree, embedding))
    }

    /// Disjoint union of presentations; returns the union and the new ids of
    /// each component's start. The union's own start is the first component's.
    pub(crate) fn disjoint_union(parts: &[PairTree]) -> (PairTree, Vec<StateId>) {
        let mut names = Vec::new();
        let mut states = Vec::new();
        let mut starts = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            let offset = states.len();
            starts.push(offset + p.start);
            names.extend(p.names.iter().map(|n| format!("{n}@{k}")));
            states.extend(p.states.iter().map(|st| PairState {
                rules: st.rules.iter().map(|&(r, t)| (r, t + offset)).collect(),
            }));
        }
        let start = starts.first().copied().unwrap_or(0);
        (
            PairTree {
                names,
                start,
                states,
            },
            starts,
        )
    }
}

fn subset_names(order: &[BTreeSet<StateId>], names: &[String]) -> Vec<String> {
    let mut used: HashMap<String, ()> = HashMap::new();
    order
        .iter()
        .map(|set| {
            let mut name = set
                .iter()
                .map(|&q| names[q].as_str())
                .collect::<Vec<_>>()
                .join("+");
            while used.contains_key(&name) {
                name.push('\'');
            }
            used.insert(name.clone(), ());
            name
        })
        .collect()
}

impl NTree {
    /// The same tree paired with the constant-zero second coordinate.
    pub fn pairize(&self) -> PairTree {
        let states = self
            .states()
            .iter()
            .map(|st| PairState {
                rules: st
                    .edges
                    .iter()
                    .map(|(&a, &t)| (PairRule::Edge { x: a, y: 0 }, t))
                    .chain(
                        st.tails
                            .iter()
                            .map(|&(c, t)| (PairRule::XTail { x: c, y: 0 }, t)),
                    )
                    .collect(),
            })
            .collect();
        PairTree {
            names: self.names().to_vec(),
            start: self.start(),
            states,
        }
    }
}

/// Builds a [`PairTree`] from named states.
#[derive(Debug, Default)]
pub struct PairTreeBuilder {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    start: Option<String>,
    rules: Vec<(String, PairRule, String)>,
}

impl PairTreeBuilder {
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

    pub fn rule(&mut self, from: &str, rule: PairRule, to: &str) -> &mut Self {
        self.rules.push((from.into(), rule, to.into()));
        self
    }

    pub fn edge(&mut self, from: &str, x: u64, y: u64, to: &str) -> &mut Self {
        self.rule(from, PairRule::Edge { x, y }, to)
    }

    pub fn xtail(&mut self, from: &str, x: ArithClass, y: u64, to: &str) -> &mut Self {
        self.rule(from, PairRule::XTail { x, y }, to)
    }

    pub fn ytail(&mut self, from: &str, x: u64, y: ArithClass, to: &str) -> &mut Self {
        self.rule(from, PairRule::YTail { x, y }, to)
    }

    pub fn dtail(&mut self, from: &str, c: ArithClass, to: &str) -> &mut Self {
        self.rule(from, PairRule::DTail(c), to)
    }

    fn resolve(&self, name: &str) -> Result<StateId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Validation(format!("unknown state {name}")))
    }

    pub fn build(&self) -> Result<PairTree> {
        let start = self
            .start
            .as_deref()
            .ok_or_else(|| Error::Validation("missing start state".into()))?;
        let start = self.resolve(start)?;
        let mut states = vec![PairState::default(); self.names.len()];
        for (from, r, to) in &self.rules {
            let (p, t) = (self.resolve(from)?, self.resolve(to)?);
            states[p].rules.push((*r, t));
        }
        PairTree::from_parts(self.names.clone(), start, states)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::ntree::fixtures::class;

    pub fn diag() -> PairTree {
        PairTreeBuilder::new()
            .state("d")
            .start("d")
            .dtail("d", class(0, 1, 0), "d")
            .build()
            .unwrap()
    }

    pub fn evpair() -> PairTree {
        PairTreeBuilder::new()
            .state("p")
            .start("p")
            .xtail("p", class(0, 2, 0), 0, "p")
            .build()
            .unwrap()
    }

    pub fn half() -> PairTree {
        PairTreeBuilder::new()
            .state("h0")
            .state("h1")
            .start("h0")
            .xtail("h0", class(0, 2, 0), 0, "h1")
            .dtail("h1", class(0, 1, 0), "h1")
            .build()
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::ntree::fixtures::{self as nf, class};

    /// First coordinates of pair members up to `depth`, letters ≤ `bound` in
    /// both coordinates, by direct simulation of every pair.
    fn brute_first_coords(s: &PairTree, depth: usize, bound: u64) -> BTreeSet<Vec<u64>> {
        let live = s.live_states();
        let mut out = BTreeSet::new();
        if !live[s.start()] {
            return out;
        }
        let mut frontier: BTreeSet<(Vec<u64>, StateId)> = BTreeSet::from([(vec![], s.start())]);
        out.insert(vec![]);
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for (u, q) in &frontier {
                for x in 0..=bound {
                    for y in 0..=bound {
                        if let Some(t) = s.state(*q).step_pair(x, y) {
                            if live[t] {
                                let mut u2 = u.clone();
                                u2.push(x);
                                out.insert(u2.clone());
                                next.insert((u2, t));
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
        out
    }

    fn ntree_strings(t: &NTree, depth: usize, bound: u64) -> BTreeSet<Vec<u64>> {
        let live = t.live_states();
        let mut out = BTreeSet::new();
        let mut frontier = vec![(vec![], t.start())];
        out.insert(vec![]);
        for _ in 0..depth {
            let mut next = vec![];
            for (s, q) in &frontier {
                for a in 0..=bound {
                    if let Some(r) = t.step(*q, a) {
                        if live[r] {
                            let mut s2 = s.clone();
                            s2.push(a);
                            out.insert(s2.clone());
                            next.push((s2, r));
                        }
                    }
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn pair_determinism_is_enforced() {
        let bad = PairTreeBuilder::new()
            .state("p")
            .start("p")
            .xtail("p", class(0, 2, 0), 4, "p")
            .ytail("p", 6, class(0, 1, 0), "p")
            .build();
        assert!(matches!(bad, Err(Error::Validation(_))));
        let ok = PairTreeBuilder::new()
            .state("p")
            .start("p")
            .xtail("p", class(0, 2, 0), 4, "p")
            .ytail("p", 5, class(0, 1, 0), "p")
            .build();
        assert!(ok.is_ok());
        let bad = PairTreeBuilder::new()
            .state("p")
            .start("p")
            .dtail("p", class(0, 3, 1), "p")
            .edge("p", 4, 4, "p")
            .build();
        assert!(bad.is_err());
    }

    #[test]
    fn projection_examples() {
        let full = diag().project().unwrap();
        assert!(ntree_strings(&full, 3, 8) == ntree_strings(&nf::full(), 3, 8));
        let ev = evpair().project().unwrap();
        assert_eq!(ntree_strings(&ev, 3, 8), ntree_strings(&nf::even(), 3, 8));
        assert_eq!(ntree_strings(&ev, 3, 8), brute_first_coords(&evpair(), 3, 8));
        let h = half().project().unwrap();
        assert_eq!(ntree_strings(&h, 3, 8), brute_first_coords(&half(), 3, 8));
        assert!(h.contains_string(&[2, 5, 7]));
        assert!(!h.contains_string(&[1]));
        assert_eq!(PairTree::empty().project(), Err(Error::EmptyTree));
    }

    #[test]
    fn projection_merges_residues() {
        let ev = evpair().project().unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev.state(0).tails, vec![(class(0, 2, 0), 0)]);
    }

    #[test]
    fn pair_subtree_examples() {
        let d3 = diag().pair_subtree(&[3], &[3]).unwrap();
        assert!(d3.contains_pair(&[3, 5, 1], &[3, 5, 1]));
        assert!(!d3.contains_pair(&[4], &[4]));
        assert!(!d3.contains_pair(&[3, 5], &[3, 4]));

        let h = half().pair_subtree(&[2], &[0]).unwrap();
        let got = brute_first_coords(&h, 3, 4);
        let want: BTreeSet<Vec<u64>> = brute_first_coords(&half(), 3, 4)
            .into_iter()
            .filter(|u| u.is_empty() || u[0] == 2)
            .collect();
        assert_eq!(got, want);

        assert_eq!(half().pair_subtree(&[], &[]).unwrap(), half());
        assert_eq!(half().pair_subtree(&[1], &[0]), Err(Error::NotInTree));
    }

    #[test]
    fn pair_subtree_embedding_tracks_the_chain() {
        let (t, emb) = half().pair_subtree_embedded(&[2, 3], &[0, 3]).unwrap();
        assert_eq!(emb[t.name(0)], "h0");
        assert_eq!(emb[t.name(1)], "h1");
        assert_eq!(emb["h1"], "h1");
    }
}
