//! σ-I-small cover schemes: one rule generating an increasing sequence of
//! I-small trees `T_n` whose bodies cover the projection.
//!
//! A scheme marks some moves of a pair presentation as *bounded*; `T_n`
//! keeps only x-letters ≤ n on bounded moves and projects. In kernel mode
//! the bounded moves are exactly those that leave the current positivity
//! stage (the removal rank drops); moves that stay inside a stage carry an
//! x-family in the ideal, so every family of `T_n` is in the ideal, while
//! any branch drops rank finitely often and is caught once `n` exceeds the
//! letters used at the drops.

use std::collections::{BTreeMap, BTreeSet};

use crate::dichotomy::derive::DerivativeTrace;
use crate::dichotomy::kernel::{big_states, positive_kernel, removal_ranks};
use crate::epset::EPSet;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::ideal::Ideal;
use crate::ntree::{NTree, StateId};
use crate::pairtree::{PairRule, PairState, PairTree};
use crate::snapshot::{letters_up_to, Enumerable, DEFAULT_NODE_BUDGET};

use super::{Check, Report};

/// Bounded moves: state name to indices into that state's rule list.
pub type BoundedMoves = BTreeMap<String, Vec<usize>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPiece {
    pub stage: usize,
    pub state: String,
    /// Presentation of the piece: every stage path from the start into
    /// `state` (all moves bounded), then the stage section from `state`.
    pub tree: PairTree,
    pub bounded: BoundedMoves,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverMode {
    LetterBound { bounded: BoundedMoves },
    DerivedPieces { pieces: Vec<CoverPiece> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverScheme {
    /// The pruned presentation being covered (a dead start state when the
    /// projection is empty).
    pub base: PairTree,
    pub ideal: Ideal,
    pub mode: CoverMode,
}

fn rank_bounded(tree: &PairTree, ideal: &Ideal) -> BoundedMoves {
    let ranks = removal_ranks(tree, ideal);
    (0..tree.len())
        .filter_map(|q| {
            let idx: Vec<usize> = tree
                .state(q)
                .rules
                .iter()
                .enumerate()
                .filter(|(_, (_, t))| ranks[*t] < ranks[q])
                .map(|(i, _)| i)
                .collect();
            (!idx.is_empty()).then(|| (tree.name(q).to_string(), idx))
        })
        .collect()
}

/// Builds a cover scheme for `s`. Without a trace the scheme is rank
/// based; with a derivative trace it is assembled from the trace's pieces.
pub fn build_cover(s: &PairTree, ideal: &Ideal, pieces: Option<&DerivativeTrace>) -> Result<CoverScheme> {
    let base = match s.prune() {
        Ok(t) => t,
        Err(_) => {
            return Ok(CoverScheme {
                base: PairTree::empty(),
                ideal: ideal.clone(),
                mode: CoverMode::LetterBound {
                    bounded: BTreeMap::new(),
                },
            })
        }
    };
    let mode = match pieces {
        None => {
            if big_states(&base, ideal).contains(&base.start()) {
                return Err(Error::NotSmall);
            }
            CoverMode::LetterBound {
                bounded: rank_bounded(&base, ideal),
            }
        }
        Some(trace) => {
            if !ideal.is_fin() {
                return Err(Error::MethodMismatch);
            }
            if !trace.final_stage().is_empty() {
                return Err(Error::NotSmall);
            }
            let mut out = Vec::new();
            for (alpha, q) in trace.pieces() {
                out.push(piece_cover(trace, alpha, q)?);
            }
            CoverMode::DerivedPieces { pieces: out }
        }
    };
    Ok(CoverScheme {
        base,
        ideal: ideal.clone(),
        mode,
    })
}

/// Rank-based cover of `s` whether or not it is small, bounding every move
/// at states whose whole x-family is outside the ideal. Used only to
/// confirm that positive inputs escape such covers.
pub fn naive_cover(s: &PairTree, ideal: &Ideal) -> CoverScheme {
    let base = s.prune().unwrap_or_else(|_| PairTree::empty());
    let bounded = (0..base.len())
        .filter(|&q| !ideal.contains(&base.state(q).x_family_into(|_| true)))
        .map(|q| (base.name(q).to_string(), (0..base.state(q).rules.len()).collect()))
        .collect();
    CoverScheme {
        base,
        ideal: ideal.clone(),
        mode: CoverMode::LetterBound { bounded },
    }
}

fn piece_cover(trace: &DerivativeTrace, alpha: usize, q: StateId) -> Result<CoverPiece> {
    let tree = &trace.tree;
    let n = tree.len();
    let in_stage: Vec<bool> = (0..n).map(|p| trace.stages[alpha].contains(&p)).collect();
    let section = tree.restrict_from(&in_stage, q);
    if big_states(&section, &Ideal::fin()).contains(&section.start())
        || positive_kernel(&section.project()?, &Ideal::fin()).positive
    {
        return Err(Error::NotSmall);
    }
    let mut bounded = rank_bounded(&section, &Ideal::fin());
    if q == tree.start() {
        return Ok(CoverPiece {
            stage: alpha,
            state: tree.name(q).to_string(),
            tree: section,
            bounded,
        });
    }

    // stage states on some path from the start to q that avoids q
    let mut avoid = in_stage.clone();
    avoid[q] = false;
    let from_start = {
        let mut seen = vec![false; n];
        let mut stack = vec![tree.start()];
        seen[tree.start()] = true;
        while let Some(p) = stack.pop() {
            for t in tree.state(p).targets() {
                if avoid[t] && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    };
    let mut goal = vec![false; n];
    goal[q] = true;
    let to_q = {
        let mut reach = goal.clone();
        loop {
            let mut changed = false;
            for p in 0..n {
                if avoid[p] && !reach[p] && tree.state(p).targets().any(|t| reach[t]) {
                    reach[p] = true;
                    changed = true;
                }
            }
            if !changed {
                break reach;
            }
        }
    };
    let prefix: Vec<StateId> = (0..n).filter(|&p| from_start[p] && to_q[p] && p != q).collect();
    let local: BTreeMap<StateId, usize> = prefix.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let offset = prefix.len();

    let mut names: Vec<String> = prefix.iter().map(|&p| format!("{}/pre", tree.name(p))).collect();
    names.extend(section.names().iter().cloned());
    let mut states: Vec<PairState> = prefix
        .iter()
        .map(|&p| PairState {
            rules: tree
                .state(p)
                .rules
                .iter()
                .filter_map(|&(r, t)| {
                    if t == q {
                        Some((r, offset + section.start()))
                    } else {
                        local.get(&t).map(|&i| (r, i))
                    }
                })
                .collect(),
        })
        .collect();
    for (name, st) in names.iter().zip(&states) {
        bounded.insert(name.clone(), (0..st.rules.len()).collect());
    }
    states.extend(section.states().iter().map(|st| PairState {
        rules: st.rules.iter().map(|&(r, t)| (r, t + offset)).collect(),
    }));
    let combined = PairTree::from_parts(names, local[&tree.start()], states)?;
    let combined = combined.prune()?;
    bounded.retain(|name, _| combined.id_of(name).is_some());
    Ok(CoverPiece {
        stage: alpha,
        state: tree.name(q).to_string(),
        tree: combined,
        bounded,
    })
}

/// `rule` with its x-letters cut to ≤ `n`, as a list of rules.
fn bound_rule(rule: PairRule, n: u64) -> Vec<PairRule> {
    match rule {
        PairRule::Edge { x, .. } | PairRule::YTail { x, .. } => {
            if x <= n {
                vec![rule]
            } else {
                vec![]
            }
        }
        PairRule::XTail { x: c, y } => c.members_up_to(n).map(|x| PairRule::Edge { x, y }).collect(),
        PairRule::DTail(c) => c.members_up_to(n).map(|x| PairRule::Edge { x, y: x }).collect(),
    }
}

fn bounded_tree(tree: &PairTree, bounded: &BoundedMoves, n: u64) -> PairTree {
    let states = (0..tree.len())
        .map(|q| {
            let marked: BTreeSet<usize> = bounded
                .get(tree.name(q))
                .map(|v| v.iter().copied().collect())
                .unwrap_or_default();
            PairState {
                rules: tree
                    .state(q)
                    .rules
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &(r, t))| {
                        let rs = if marked.contains(&i) { bound_rule(r, n) } else { vec![r] };
                        rs.into_iter().map(move |r| (r, t))
                    })
                    .collect(),
            }
        })
        .collect();
    PairTree::from_parts(tree.names().to_vec(), tree.start(), states)
        .expect("bounding keeps a valid presentation")
}

/// The tree `T_n` generated by the scheme.
pub fn cover_tree(scheme: &CoverScheme, n: u64) -> NTree {
    match &scheme.mode {
        CoverMode::LetterBound { bounded } => bounded_tree(&scheme.base, bounded, n)
            .project()
            .unwrap_or_else(|_| NTree::empty()),
        CoverMode::DerivedPieces { pieces } => {
            let parts: Vec<PairTree> = pieces
                .iter()
                .filter_map(|p| bounded_tree(&p.tree, &p.bounded, n).prune().ok())
                .collect();
            if parts.is_empty() {
                return NTree::empty();
            }
            let (union, starts) = PairTree::disjoint_union(&parts);
            union.project_from(&starts.into_iter().collect())
        }
    }
}

/// Checks (a) every `T_n`, n ≤ `nmax`, has all successor families in the
/// ideal, (b) `T_n ⊆ T_{n+1}` on snapshots, (c) every first coordinate of
/// the base at (`depth`, `bound`) lies in some `T_n`.
pub fn verify_cover(scheme: &CoverScheme, depth: usize, bound: u64, nmax: u64) -> Report {
    verify_cover_with(scheme, depth, bound, nmax, Exec::default())
}

pub fn verify_cover_with(
    scheme: &CoverScheme,
    depth: usize,
    bound: u64,
    nmax: u64,
    exec: Exec,
) -> Report {
    let indices: Vec<u64> = (0..=nmax).collect();
    let trees = exec::map(exec, &indices, |&n| cover_tree(scheme, n));
    let letters = letters_up_to(bound);

    let small: Vec<String> = trees
        .iter()
        .enumerate()
        .flat_map(|(n, t)| {
            let live = t.live_states();
            let keep = live.clone();
            t.states()
                .iter()
                .enumerate()
                .filter(move |(q, _)| keep[*q])
                .filter_map(move |(q, st)| {
                    let fam: EPSet = st.family_into(|p| live[p]);
                    (!scheme.ideal.contains(&fam))
                        .then(|| format!("T_{n} state {} has family {fam} outside the ideal", t.name(q)))
                })
        })
        .collect();

    let snaps: Vec<_> = exec::map(exec, &trees, |t| {
        t.snapshot_with_letters(depth, &letters, DEFAULT_NODE_BUDGET)
    });
    let mut monotone = Vec::new();
    let mut snap_sets = Vec::new();
    for (n, s) in snaps.into_iter().enumerate() {
        match s {
            Ok(s) => snap_sets.push(s.members),
            Err(e) => {
                monotone.push(format!("T_{n}: {e}"));
                snap_sets.push(BTreeSet::new());
            }
        }
    }
    for n in 1..snap_sets.len() {
        if let Some(u) = snap_sets[n - 1].difference(&snap_sets[n]).next() {
            monotone.push(format!("{u:?} is in T_{} but not in T_{n}", n - 1));
        }
    }

    let coverage = match scheme.base.first_coordinates(depth, &letters, DEFAULT_NODE_BUDGET) {
        Ok(firsts) => firsts
            .into_iter()
            .filter(|u| !snap_sets.iter().any(|s| s.contains(u)))
            .map(|u| format!("{u:?} lies in no T_n with n ≤ {nmax}"))
            .collect(),
        Err(e) => vec![format!("{e}")],
    };
    Report {
        checks: vec![
            Check::new("small", small),
            Check::new("monotone", monotone),
            Check::new("coverage", coverage),
        ],
    }
}
