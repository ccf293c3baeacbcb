//! I-positive witnesses: uniform sub-presentations whose projection is a
//! perfect tree branching only on families outside the ideal.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::dichotomy::derive::{derive_sequence, DerivativeTrace};
use crate::dichotomy::kernel::{big_states, positive_kernel};
use crate::dichotomy::Method;
use crate::epset::{Cell, EPSet, Frame};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ntree::{NTree, StateId};
use crate::pairtree::{PairRule, PairState, PairTree};
use crate::snapshot::{letters_up_to, Enumerable, DEFAULT_NODE_BUDGET};

use super::{Check, Report};

/// A pair tree `W` inside `S` (via `embedding`, state name to state name)
/// together with its x-projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPairTree {
    pub tree: PairTree,
    pub projection: NTree,
    pub embedding: BTreeMap<String, String>,
}

/// Builds an I-positive witness inside `s`.
pub fn build_witness(s: &PairTree, ideal: &Ideal, method: Method) -> Result<WitnessPairTree> {
    let w = match method {
        Method::Kernel => {
            let pruned = s.prune().map_err(|_| Error::NotPositive)?;
            kernel_witness(&pruned, ideal)?
        }
        Method::Derivative => {
            if !ideal.is_fin() {
                return Err(Error::MethodMismatch);
            }
            let trace = derive_sequence(s);
            derivative_witness(&trace)?
        }
    };
    let report = verify_witness(&w, s, ideal);
    if !report.accepted() {
        return Err(Error::InternalSoundness(format!(
            "witness failed verification: {}",
            report.failures().join("; ")
        )));
    }
    Ok(w)
}

/// Witness on the big states of a pruned presentation: states whose
/// x-family into the big states is outside the ideal branch on that whole
/// family; every other big state takes one move along a shortest path
/// toward a branching state.
pub(crate) fn kernel_witness(s: &PairTree, ideal: &Ideal) -> Result<WitnessPairTree> {
    let n = s.len();
    let big_set = big_states(s, ideal);
    if !big_set.contains(&s.start()) {
        return Err(Error::NotPositive);
    }
    let big: Vec<bool> = (0..n).map(|q| big_set.contains(&q)).collect();
    let branching: Vec<bool> = (0..n)
        .map(|q| big[q] && !ideal.contains(&s.state(q).x_family_into(|t| big[t])))
        .collect();

    // distance to the nearest branching state, moving inside big states
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for q in (0..n).filter(|&q| branching[q]) {
        dist[q] = 0;
        queue.push_back(q);
    }
    while let Some(t) = queue.pop_front() {
        for p in 0..n {
            if big[p] && dist[p] == usize::MAX && s.state(p).targets().any(|x| x == t) {
                dist[p] = dist[t] + 1;
                queue.push_back(p);
            }
        }
    }

    let mut states = vec![PairState::default(); n];
    for q in (0..n).filter(|&q| big[q]) {
        let rules = &s.state(q).rules;
        let body = if branching[q] {
            branching_rules(rules, &big)
        } else {
            let (rule, t) = rules
                .iter()
                .enumerate()
                .filter(|(_, (_, t))| big[*t] && dist[*t] + 1 == dist[q])
                .min_by_key(|(i, (_, t))| (*t, *i))
                .map(|(_, &rt)| rt)
                .ok_or_else(|| Error::InternalSoundness("big state without a path".into()))?;
            let x = rule.x_letters().min().unwrap();
            let y = rule.least_y(x).unwrap();
            vec![(PairRule::Edge { x, y }, t)]
        };
        states[q] = PairState { rules: body };
    }
    let tree = PairTree::from_parts(s.names().to_vec(), s.start(), states)?;
    let projection = tree.project()?;
    let embedding = tree
        .names()
        .iter()
        .map(|name| (name.clone(), name.clone()))
        .collect();
    Ok(WitnessPairTree {
        tree,
        projection,
        embedding,
    })
}

/// For every x-letter with a move into `keep`, the least such move (by
/// target id, then rule order), made uniform: one y-letter per x-letter.
fn branching_rules(rules: &[(PairRule, StateId)], keep: &[bool]) -> Vec<(PairRule, StateId)> {
    let mut frame = Frame::default();
    for (r, t) in rules {
        if keep[*t] {
            r.absorb_x(&mut frame);
        }
    }
    let mut edges = Vec::new();
    // class cells grouped by the rule that serves them
    let mut grouped: BTreeMap<usize, EPSet> = BTreeMap::new();
    for cell in frame.cells() {
        let rep = cell.representative();
        let chosen = rules
            .iter()
            .enumerate()
            .filter(|(_, (r, t))| keep[*t] && r.applies_x(rep))
            .min_by_key(|(i, (_, t))| (*t, *i));
        let Some((i, &(rule, t))) = chosen else {
            continue;
        };
        match cell {
            Cell::Letter(x) => edges.push((
                PairRule::Edge {
                    x,
                    y: rule.least_y(x).unwrap(),
                },
                t,
            )),
            Cell::Class(c) => grouped.entry(i).or_default().insert_class(c),
        }
    }
    let mut out = edges;
    for (i, letters) in grouped {
        let (rule, t) = rules[i];
        for c in letters.normalized().classes {
            let r = match rule {
                PairRule::XTail { y, .. } => PairRule::XTail { x: c, y },
                PairRule::DTail(_) => PairRule::DTail(c),
                // explicit x-letters sit below the frame threshold
                PairRule::Edge { .. } | PairRule::YTail { .. } => unreachable!(),
            };
            out.push((r, t));
        }
    }
    out
}

/// Shortest, then least, pair of strings leading from the start of `s` to
/// `q`.
pub(crate) fn canonical_node(s: &PairTree, q: StateId) -> Option<(Vec<u64>, Vec<u64>)> {
    let mut prev: Vec<Option<(StateId, u64, u64)>> = vec![None; s.len()];
    let mut seen = vec![false; s.len()];
    seen[s.start()] = true;
    let mut queue = VecDeque::from([s.start()]);
    while let Some(p) = queue.pop_front() {
        if p == q {
            let (mut u, mut v) = (Vec::new(), Vec::new());
            let mut cur = p;
            while let Some((from, x, y)) = prev[cur] {
                u.push(x);
                v.push(y);
                cur = from;
            }
            u.reverse();
            v.reverse();
            return Some((u, v));
        }
        let mut moves: Vec<(StateId, u64, u64)> = s
            .state(p)
            .rules
            .iter()
            .map(|(r, t)| {
                let x = r.x_letters().min().unwrap();
                (*t, x, r.least_y(x).unwrap())
            })
            .collect();
        moves.sort();
        for (t, x, y) in moves {
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some((p, x, y));
                queue.push_back(t);
            }
        }
    }
    None
}

/// The presentation of piece `(alpha, q)`: the canonical chain down to a
/// node at `q`, then the stage-α behavior. The map sends its state names to
/// names in the traced tree.
pub(crate) fn piece_tree(
    trace: &DerivativeTrace,
    alpha: usize,
    q: StateId,
) -> Option<(PairTree, BTreeMap<String, String>)> {
    let stage = &trace.stages[alpha];
    if !stage.contains(&trace.tree.start()) {
        return None;
    }
    let stage_tree = trace.stage_tree_from(alpha, trace.tree.start());
    let local = stage_tree.id_of(trace.tree.name(q))?;
    let (u, v) = canonical_node(&stage_tree, local)?;
    stage_tree.pair_subtree_embedded(&u, &v).ok()
}

/// Witness from the first derivative piece whose closure has a nonempty
/// Fin-kernel.
pub(crate) fn derivative_witness(trace: &DerivativeTrace) -> Result<WitnessPairTree> {
    if !trace.final_stage().is_empty() {
        return Err(Error::InternalSoundness(
            "derivative fixpoint is nonempty although every section projection of a \
             finite-state presentation is closed"
                .into(),
        ));
    }
    for (alpha, q) in trace.pieces() {
        let Some((piece, to_traced)) = piece_tree(trace, alpha, q) else {
            continue;
        };
        let projected = piece.project()?;
        if !positive_kernel(&projected, &Ideal::fin()).positive {
            continue;
        }
        let mut w = kernel_witness(&piece.prune()?, &Ideal::fin())?;
        w.embedding = w
            .embedding
            .into_values()
            .map(|piece_name| {
                let target = to_traced[&piece_name].clone();
                (piece_name, target)
            })
            .collect();
        return Ok(w);
    }
    Err(Error::NotPositive)
}

/// Whether the pairs of `rule` are all moves of `s` at `from` into `to`.
fn rule_covered(s: &PairTree, from: StateId, rule: &PairRule, to: StateId) -> bool {
    let st = s.state(from);
    let hits = |x: u64, y: u64| st.step_pair(x, y) == Some(to);
    match *rule {
        PairRule::Edge { x, y } => hits(x, y),
        PairRule::XTail { x: c, y } => {
            let mut frame = Frame::default();
            frame.absorb_class(&c);
            frame.absorb_letter(y);
            for (r, _) in &st.rules {
                r.absorb_x(&mut frame);
            }
            let ok = frame
                .cells()
                .map(|cell| cell.representative())
                .filter(|&x| c.contains(x))
                .all(|x| hits(x, y));
            ok
        }
        PairRule::YTail { x, y: c } => {
            let mut frame = Frame::default();
            frame.absorb_class(&c);
            frame.absorb_letter(x);
            for (r, _) in &st.rules {
                r.absorb_y(&mut frame);
            }
            let ok = frame
                .cells()
                .map(|cell| cell.representative())
                .filter(|&y| c.contains(y))
                .all(|y| hits(x, y));
            ok
        }
        PairRule::DTail(c) => {
            let mut frame = Frame::default();
            frame.absorb_class(&c);
            for (r, _) in &st.rules {
                r.absorb_x(&mut frame);
                r.absorb_y(&mut frame);
            }
            let ok = frame
                .cells()
                .map(|cell| cell.representative())
                .filter(|&n| c.contains(n))
                .all(|n| hits(n, n));
            ok
        }
    }
}

fn x_sets_disjoint(a: &PairRule, b: &PairRule) -> bool {
    let (sa, sb) = (a.x_letters(), b.x_letters());
    let frame = Frame::for_sets([&sa, &sb]);
    let shared = frame.cells().any(|c| {
        let r = c.representative();
        sa.contains(r) && sb.contains(r)
    });
    !shared
}

/// Checks a witness against `s` and `ideal` using tree primitives and
/// snapshots only.
pub fn verify_witness(w: &WitnessPairTree, s: &PairTree, ideal: &Ideal) -> Report {
    verify_witness_at(w, s, ideal, 4, 8)
}

pub fn verify_witness_at(
    w: &WitnessPairTree,
    s: &PairTree,
    ideal: &Ideal,
    depth: usize,
    bound: u64,
) -> Report {
    let mut checks = Vec::new();
    let tree = &w.tree;

    // embedding legality
    let image = |q: StateId| w.embedding.get(tree.name(q)).and_then(|n| s.id_of(n));
    let mut bad = Vec::new();
    if image(tree.start()) != Some(s.start()) {
        bad.push("start does not map to the start of S".to_string());
    }
    for q in 0..tree.len() {
        let Some(from) = image(q) else {
            bad.push(format!("state {} has no image", tree.name(q)));
            continue;
        };
        for (r, t) in &tree.state(q).rules {
            match image(*t) {
                Some(to) if rule_covered(s, from, r, to) => {}
                _ => bad.push(format!("move {r:?} at {} is not a move of S", tree.name(q))),
            }
        }
    }
    checks.push(Check::new("embedding", bad));

    // uniformity
    let mut bad = Vec::new();
    for q in 0..tree.len() {
        let rules = &tree.state(q).rules;
        for (i, (r, _)) in rules.iter().enumerate() {
            if matches!(r, PairRule::YTail { .. }) {
                bad.push(format!("{}: {r:?} carries many y-letters", tree.name(q)));
            }
            for (o, _) in &rules[..i] {
                if !x_sets_disjoint(o, r) {
                    bad.push(format!("{}: {o:?} and {r:?} share an x-letter", tree.name(q)));
                }
            }
        }
    }
    checks.push(Check::new("uniform", bad));

    let pruned = tree.is_pruned() && tree.live_states()[tree.start()];
    checks.push(Check::new(
        "pruned",
        if pruned {
            vec![]
        } else {
            vec!["witness has states without infinite continuation".into()]
        },
    ));

    let projection = match tree.project() {
        Ok(p) => p,
        Err(e) => {
            checks.push(Check::new("projection", vec![format!("{e}")]));
            return Report { checks };
        }
    };
    let letters = letters_up_to(bound);
    let snap = |t: &NTree| t.snapshot_with_letters(depth, &letters, DEFAULT_NODE_BUDGET);
    let same = match (snap(&projection), snap(&w.projection)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    checks.push(Check::new(
        "projection",
        if same {
            vec![]
        } else {
            vec!["stored projection differs from the recomputed one".into()]
        },
    ));

    checks.push(Check::new(
        "perfect",
        if projection.is_perfect_tree() {
            vec![]
        } else {
            vec!["projection has a node with no branching extension".into()]
        },
    ));

    let mut bad = Vec::new();
    let large: Vec<bool> = projection
        .states()
        .iter()
        .map(|st| !ideal.contains(&st.successor_letters()))
        .collect();
    for (q, st) in projection.states().iter().enumerate() {
        let fam = st.successor_letters();
        if fam.has_two() && !large[q] {
            bad.push(format!("branching family {fam} at {} is in the ideal", projection.name(q)));
        }
    }
    let reach = projection.states_reaching(&large);
    for q in (0..projection.len()).filter(|&q| !reach[q]) {
        bad.push(format!(
            "{} never reaches a family outside the ideal",
            projection.name(q)
        ));
    }
    checks.push(Check::new("large-branching", bad));

    let bad = match (
        snap(&projection),
        s.first_coordinates(depth, &letters, DEFAULT_NODE_BUDGET),
    ) {
        (Ok(px), Ok(sx)) => px
            .members
            .iter()
            .filter(|u| !sx.contains(*u))
            .map(|u| format!("{u:?} is not a first coordinate of S"))
            .collect(),
        (Err(e), _) | (_, Err(e)) => vec![format!("{e}")],
    };
    checks.push(Check::new("snapshot-containment", bad));
    Report { checks }
}

/// A string of `w`'s projection of length ≤ `depth` that is not in `tree`,
/// probing letters ≤ `bound` and at each node the least letter of the
/// witness family missing from `tree`'s family.
pub fn witness_escape(w: &WitnessPairTree, tree: &NTree, depth: usize, bound: u64) -> Option<Vec<u64>> {
    let tx = &w.projection;
    let mut frontier: Vec<(Vec<u64>, StateId, StateId)> = match tree.prune() {
        Ok(t) => {
            let start = tree.id_of(t.name(t.start()));
            match start {
                Some(st) => vec![(Vec::new(), tx.start(), st)],
                None => return Some(Vec::new()),
            }
        }
        Err(_) => return Some(Vec::new()),
    };
    let live = tree.live_states();
    for _ in 0..depth {
        let mut next = Vec::new();
        for (s, q, p) in &frontier {
            let fam = tx.state(*q).successor_letters();
            let mut probes: BTreeSet<u64> = fam.members_up_to(bound).into_iter().collect();
            let theirs = tree.state(*p).family_into(|t| live[t]);
            if let Some(a) = fam.least_outside(&theirs) {
                probes.insert(a);
            }
            for a in probes {
                let mut s2 = s.clone();
                s2.push(a);
                let qn = tx.step(*q, a).unwrap();
                match tree.step(*p, a).filter(|&t| live[t]) {
                    Some(pn) => next.push((s2, qn, pn)),
                    None => return Some(s2),
                }
            }
        }
        frontier = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntree::fixtures::*;
    use crate::pairtree::fixtures::*;

    #[test]
    fn diag_witness_is_diag() {
        let w = build_witness(&diag(), &Ideal::fin(), Method::Kernel).unwrap();
        assert_eq!(w.tree, diag());
        let full_snap = crate::snapshot::truncate_enumerate(&full(), 3, 5).unwrap();
        let snap = crate::snapshot::truncate_enumerate(&w.projection, 3, 5).unwrap();
        assert_eq!(snap.members, full_snap.members);
    }

    #[test]
    fn even_and_half_witnesses() {
        let w = build_witness(&even().pairize(), &Ideal::fin(), Method::Kernel).unwrap();
        assert!(w.projection.is_perfect_tree());
        for st in w.projection.states() {
            assert!(!st.successor_letters().is_finite());
        }
        let w = build_witness(&half(), &Ideal::fin(), Method::Kernel).unwrap();
        assert!(verify_witness(&w, &half(), &Ideal::fin()).accepted());
        assert!(w.projection.contains_string(&[4, 1, 1]));
        assert!(!w.projection.contains_string(&[3]));
        for st in w.projection.states() {
            assert!(!st.successor_letters().is_finite());
        }
    }

    #[test]
    fn derivative_witness_matches_kernel_verdict() {
        for s in [diag(), half(), even().pairize()] {
            let w = build_witness(&s, &Ideal::fin(), Method::Derivative).unwrap();
            assert!(verify_witness(&w, &s, &Ideal::fin()).accepted());
        }
        assert_eq!(
            build_witness(&comb().pairize(), &Ideal::fin(), Method::Derivative),
            Err(Error::NotPositive)
        );
    }

    #[test]
    fn not_positive_inputs() {
        assert_eq!(
            build_witness(&comb().pairize(), &Ideal::fin(), Method::Kernel),
            Err(Error::NotPositive)
        );
        let evens = Ideal::dilute(EPSet::from_class(class(0, 2, 0))).unwrap();
        assert_eq!(
            build_witness(&evpair(), &evens, Method::Derivative),
            Err(Error::MethodMismatch)
        );
    }

    #[test]
    fn comb_is_rejected_as_a_witness() {
        let s = comb().pairize();
        let w = WitnessPairTree {
            tree: s.clone(),
            projection: comb(),
            embedding: s.names().iter().map(|n| (n.clone(), n.clone())).collect(),
        };
        let report = verify_witness(&w, &s, &Ideal::fin());
        assert!(!report.accepted());
        assert!(!report.passed("perfect"));
        assert!(!report.passed("large-branching"));
        assert!(report.passed("embedding"));
    }

    #[test]
    fn redirected_move_fails_embedding() {
        let mut w = build_witness(&half(), &Ideal::fin(), Method::Kernel).unwrap();
        let h0 = w.tree.id_of("h0").unwrap();
        let mut states: Vec<PairState> = w.tree.states().to_vec();
        // x-letter 1 has no move at h0 in HALF
        states[h0].rules = vec![(PairRule::Edge { x: 1, y: 0 }, w.tree.id_of("h1").unwrap())];
        w.tree = PairTree::from_parts(w.tree.names().to_vec(), w.tree.start(), states).unwrap();
        let report = verify_witness(&w, &half(), &Ideal::fin());
        assert!(!report.passed("embedding"));
    }
}
