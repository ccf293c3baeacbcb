//! Seeded random presentations for property tests, acceptance sweeps and
//! benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epset::{ArithClass, EPSet};
use crate::ideal::Ideal;
use crate::ntree::{NState, NTree};
use crate::pairtree::{PairRule, PairState, PairTree};

/// Largest explicit letter in generated presentations.
pub const LETTER_BOUND: u64 = 8;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_class(rng: &mut impl Rng) -> ArithClass {
    let modulus = rng.gen_range(1..=3);
    ArithClass::new(rng.gen_range(0..=3), modulus, rng.gen_range(0..modulus)).unwrap()
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// A tree on ℕ with 1..=`max_states` states, mixing explicit edges (letters
/// ≤ [`LETTER_BOUND`]) and disjoint tail classes. Unreachable states are
/// dropped, so the result may be smaller.
pub fn random_ntree(rng: &mut impl Rng, max_states: usize) -> NTree {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n)
        .map(|_| {
            let mut st = NState::default();
            if rng.gen_bool(0.5) {
                // tails: some residues of one frame
                let modulus = rng.gen_range(1..=3);
                let threshold = rng.gen_range(0..=3);
                for r in 0..modulus {
                    if rng.gen_bool(0.6) {
                        let c = ArithClass::new(threshold, modulus, r).unwrap();
                        st.tails.push((c, rng.gen_range(0..n)));
                    }
                }
            }
            for _ in 0..rng.gen_range(0..=3) {
                let a = rng.gen_range(0..=LETTER_BOUND);
                if !st.tails.iter().any(|(c, _)| c.contains(a)) {
                    st.edges.insert(a, rng.gen_range(0..n));
                }
            }
            st
        })
        .collect();
    NTree::from_parts(names(n), 0, states).expect("generated rules are disjoint")
}

fn random_rule(rng: &mut impl Rng) -> PairRule {
    let letter = |rng: &mut dyn rand::RngCore| rng.gen_range(0..=LETTER_BOUND);
    match rng.gen_range(0..4) {
        0 => PairRule::Edge {
            x: letter(rng),
            y: letter(rng),
        },
        1 => PairRule::XTail {
            x: random_class(rng),
            y: letter(rng),
        },
        2 => PairRule::YTail {
            x: letter(rng),
            y: random_class(rng),
        },
        _ => PairRule::DTail(random_class(rng)),
    }
}

/// A pair-deterministic presentation with 1..=`max_states` states and up to
/// four moves per state; overlapping candidate moves are discarded.
pub fn random_pairtree(rng: &mut impl Rng, max_states: usize) -> PairTree {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n)
        .map(|_| {
            let mut rules: Vec<(PairRule, usize)> = Vec::new();
            for _ in 0..rng.gen_range(1..=4) {
                let r = random_rule(rng);
                if !rules.iter().any(|(o, _)| o.overlaps(&r)) {
                    rules.push((r, rng.gen_range(0..n)));
                }
            }
            PairState { rules }
        })
        .collect();
    PairTree::from_parts(names(n), 0, states).expect("generated rules are disjoint")
}

/// A random eventually periodic set with letters ≤ [`LETTER_BOUND`] and at
/// most two classes.
pub fn random_epset(rng: &mut impl Rng) -> EPSet {
    let mut s = EPSet::from_letters((0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..=LETTER_BOUND)));
    for _ in 0..rng.gen_range(0..=2) {
        s.insert_class(random_class(rng));
    }
    s
}

/// A random proper dilute ideal: Fin or a base of some residues modulo a
/// small modulus, never all of them.
pub fn random_ideal(rng: &mut impl Rng) -> Ideal {
    if rng.gen_bool(0.3) {
        return Ideal::fin();
    }
    let modulus = rng.gen_range(2..=4);
    let mut residues: Vec<u64> = (0..modulus).collect();
    residues.shuffle(rng);
    let keep = rng.gen_range(1..modulus) as usize;
    let mut base = EPSet::from_letters((0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..=LETTER_BOUND)));
    let threshold = rng.gen_range(0..=2);
    for &r in &residues[..keep] {
        base.insert_class(ArithClass::new(threshold, modulus, r).unwrap());
    }
    Ideal::dilute(base).expect("a residue is left out")
}
