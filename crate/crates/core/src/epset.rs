//! Eventually periodic subsets of ℕ.
//!
//! An [`EPSet`] is a finite set of letters united with finitely many
//! arithmetic classes. Every Boolean question about such sets reduces to
//! residue bookkeeping inside a [`Frame`]: beyond a common threshold every
//! set is determined by which residues it contains modulo a common modulus.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard ceiling on any modulus produced by lcm bookkeeping.
pub const MODULUS_CEILING: u64 = 1 << 24;

/// `{n ∈ ℕ : n ≥ threshold ∧ n ≡ residue (mod modulus)}`; always infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArithClass {
    threshold: u64,
    modulus: u64,
    residue: u64,
}

impl ArithClass {
    pub fn new(threshold: u64, modulus: u64, residue: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Validation("class modulus must be at least 1".into()));
        }
        if residue >= modulus {
            return Err(Error::Validation(format!(
                "class residue {residue} must be below modulus {modulus}"
            )));
        }
        Ok(ArithClass {
            threshold,
            modulus,
            residue,
        })
    }

    /// All of ℕ.
    pub const fn all() -> Self {
        ArithClass {
            threshold: 0,
            modulus: 1,
            residue: 0,
        }
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.threshold && n % self.modulus == self.residue
    }

    /// Least member.
    pub fn first(&self) -> u64 {
        let base = self.threshold - self.threshold % self.modulus + self.residue;
        if base >= self.threshold {
            base
        } else {
            base + self.modulus
        }
    }

    /// The `k`-th member in increasing order, counting from zero.
    pub fn nth(&self, k: u64) -> u64 {
        self.first() + k * self.modulus
    }

    /// Two classes meet iff their residues agree modulo the gcd of the
    /// moduli; when they do they share infinitely many members.
    pub fn intersects(&self, other: &ArithClass) -> bool {
        let g = self.modulus.gcd(&other.modulus);
        self.residue % g == other.residue % g
    }

    /// Members not exceeding `bound`, ascending.
    pub fn members_up_to(&self, bound: u64) -> impl Iterator<Item = u64> {
        let first = self.first();
        let step = self.modulus;
        (0..)
            .map(move |k| first + k * step)
            .take_while(move |&n| n <= bound)
    }
}

impl fmt::Display for ArithClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.threshold, self.modulus, self.residue)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    let l = a.lcm(&b);
    assert!(
        l <= MODULUS_CEILING,
        "modulus bookkeeping exceeds {MODULUS_CEILING}"
    );
    l
}

/// A common threshold and modulus: every letter predicate absorbed into the
/// frame is constant on each [`Cell`] the frame produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frame {
    pub threshold: u64,
    pub modulus: u64,
}

impl Default for Frame {
    fn default() -> Self {
        Frame {
            threshold: 0,
            modulus: 1,
        }
    }
}

/// One block of the partition of ℕ induced by a [`Frame`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    Letter(u64),
    Class(ArithClass),
}

impl Cell {
    /// Least member; every absorbed predicate agrees on the whole cell with
    /// its value here.
    pub fn representative(&self) -> u64 {
        match self {
            Cell::Letter(n) => *n,
            Cell::Class(c) => c.first(),
        }
    }

    pub fn to_epset(&self) -> EPSet {
        match self {
            Cell::Letter(n) => EPSet::from_letters([*n]),
            Cell::Class(c) => EPSet::from_class(*c),
        }
    }
}

impl Frame {
    pub fn absorb_letter(&mut self, n: u64) {
        self.threshold = self.threshold.max(n + 1);
    }

    pub fn absorb_class(&mut self, c: &ArithClass) {
        self.threshold = self.threshold.max(c.threshold);
        self.modulus = lcm(self.modulus, c.modulus);
    }

    pub fn absorb_set(&mut self, s: &EPSet) {
        if let Some(&max) = s.explicit.iter().next_back() {
            self.absorb_letter(max);
        }
        for c in &s.classes {
            self.absorb_class(c);
        }
    }

    pub fn for_sets<'a>(sets: impl IntoIterator<Item = &'a EPSet>) -> Frame {
        let mut frame = Frame::default();
        for s in sets {
            frame.absorb_set(s);
        }
        frame
    }

    /// Letters below the threshold, then one class per residue.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let letters = (0..self.threshold).map(Cell::Letter);
        let classes = (0..self.modulus).map(move |r| {
            Cell::Class(ArithClass {
                threshold: self.threshold,
                modulus: self.modulus,
                residue: r,
            })
        });
        letters.chain(classes)
    }
}

/// Finite letters plus arithmetic classes; denotes their union.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EPSet {
    pub explicit: BTreeSet<u64>,
    pub classes: Vec<ArithClass>,
}

/// Membership table of an [`EPSet`] with respect to a [`Frame`].
#[derive(Clone, Debug, PartialEq, Eq)]
struct Profile {
    below: Vec<bool>,
    residues: Vec<bool>,
}

impl EPSet {
    pub fn empty() -> Self {
        EPSet::default()
    }

    pub fn all() -> Self {
        EPSet::from_class(ArithClass::all())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = u64>) -> Self {
        EPSet {
            explicit: letters.into_iter().collect(),
            classes: Vec::new(),
        }
    }

    pub fn from_class(c: ArithClass) -> Self {
        EPSet {
            explicit: BTreeSet::new(),
            classes: vec![c],
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.explicit.contains(&n) || self.classes.iter().any(|c| c.contains(n))
    }

    /// Syntactic emptiness coincides with semantic emptiness: classes are
    /// never empty.
    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.classes.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.classes.is_empty()
    }

    /// True when the set has at least two members.
    pub fn has_two(&self) -> bool {
        !self.classes.is_empty() || self.explicit.len() >= 2
    }

    pub fn min(&self) -> Option<u64> {
        let e = self.explicit.iter().next().copied();
        let c = self.classes.iter().map(|c| c.first()).min();
        match (e, c) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn union(&self, other: &EPSet) -> EPSet {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn extend(&mut self, other: &EPSet) {
        self.explicit.extend(other.explicit.iter().copied());
        for c in &other.classes {
            if !self.classes.contains(c) {
                self.classes.push(*c);
            }
        }
    }

    pub fn insert(&mut self, n: u64) {
        self.explicit.insert(n);
    }

    pub fn insert_class(&mut self, c: ArithClass) {
        if !self.classes.contains(&c) {
            self.classes.push(c);
        }
    }

    /// Members not exceeding `bound`, ascending.
    pub fn members_up_to(&self, bound: u64) -> Vec<u64> {
        (0..=bound).filter(|&n| self.contains(n)).collect()
    }

    fn profile(&self, frame: Frame) -> Profile {
        let below = (0..frame.threshold).map(|n| self.contains(n)).collect();
        let residues = (0..frame.modulus)
            .map(|r| {
                // the least n ≥ threshold with n ≡ r
                let base = frame.threshold - frame.threshold % frame.modulus + r;
                let n = if base >= frame.threshold {
                    base
                } else {
                    base + frame.modulus
                };
                self.contains(n)
            })
            .collect();
        Profile { below, residues }
    }

    /// `self \ other` is finite.
    pub fn difference_is_finite(&self, other: &EPSet) -> bool {
        let frame = Frame::for_sets([self, other]);
        let a = self.profile(frame);
        let b = other.profile(frame);
        a.residues
            .iter()
            .zip(&b.residues)
            .all(|(&x, &y)| !x || y)
    }

    pub fn is_subset(&self, other: &EPSet) -> bool {
        let frame = Frame::for_sets([self, other]);
        let a = self.profile(frame);
        let b = other.profile(frame);
        let le = |x: &[bool], y: &[bool]| x.iter().zip(y).all(|(&p, &q)| !p || q);
        le(&a.below, &b.below) && le(&a.residues, &b.residues)
    }

    pub fn semantic_eq(&self, other: &EPSet) -> bool {
        let frame = Frame::for_sets([self, other]);
        self.profile(frame) == other.profile(frame)
    }

    /// Least member of `self` not in `other`.
    pub fn least_outside(&self, other: &EPSet) -> Option<u64> {
        let frame = Frame::for_sets([self, other]);
        // beyond the threshold membership repeats with the frame modulus
        (0..frame.threshold + frame.modulus).find(|&n| self.contains(n) && !other.contains(n))
    }

    /// ℕ minus this set, as an eventually periodic set.
    pub fn complement(&self) -> EPSet {
        let frame = Frame::for_sets([self]);
        let p = self.profile(frame);
        let explicit = (0..frame.threshold)
            .filter(|&n| !p.below[n as usize])
            .collect();
        let classes = (0..frame.modulus)
            .filter(|&r| !p.residues[r as usize])
            .map(|r| ArithClass {
                threshold: frame.threshold,
                modulus: frame.modulus,
                residue: r,
            })
            .collect();
        EPSet { explicit, classes }.normalized()
    }

    /// Canonical presentation: smallest period, then smallest common
    /// threshold, classes in residue order.
    pub fn normalized(&self) -> EPSet {
        let frame = Frame::for_sets([self]);
        let p = self.profile(frame);
        let l = frame.modulus;
        let period = (1..=l)
            .filter(|d| l % d == 0)
            .find(|&d| (0..l).all(|r| p.residues[r as usize] == p.residues[(r % d) as usize]))
            .unwrap_or(l);
        // periodic extrapolation of the tail, valid at and above the threshold
        let tail_has = |n: u64| p.residues[(n % l) as usize];
        let mut threshold = frame.threshold;
        while threshold > 0 && p.below[(threshold - 1) as usize] == tail_has(threshold - 1) {
            threshold -= 1;
        }
        let explicit = (0..threshold)
            .filter(|&n| p.below[n as usize])
            .collect();
        let classes = (0..period)
            .filter(|&r| tail_has(r))
            .map(|r| ArithClass {
                threshold,
                modulus: period,
                residue: r,
            })
            .collect();
        EPSet { explicit, classes }
    }
}

impl fmt::Display for EPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for n in &self.explicit {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{n}")?;
        }
        for c in &self.classes {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "[{c}]")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(k: u64, m: u64, r: u64) -> ArithClass {
        ArithClass::new(k, m, r).unwrap()
    }

    #[test]
    fn class_validation() {
        assert!(ArithClass::new(0, 0, 0).is_err());
        assert!(ArithClass::new(0, 3, 3).is_err());
        assert_eq!(class(5, 3, 1).first(), 7);
        assert_eq!(class(7, 3, 1).first(), 7);
        assert_eq!(class(0, 2, 1).nth(3), 7);
    }

    #[test]
    fn class_intersection() {
        assert!(!class(0, 2, 0).intersects(&class(0, 2, 1)));
        assert!(class(0, 4, 2).intersects(&class(9, 2, 0)));
        assert!(class(0, 3, 1).intersects(&class(0, 2, 0)));
    }

    #[test]
    fn difference_and_equality() {
        let evens = EPSet::from_class(class(0, 2, 0));
        let mut x = EPSet::from_class(class(0, 4, 0));
        x.insert(3);
        assert!(x.difference_is_finite(&evens));
        let odds = EPSet::from_class(class(0, 2, 1));
        assert!(!odds.difference_is_finite(&evens));
        let joined = EPSet::from_class(class(0, 4, 0)).union(&EPSet::from_class(class(0, 4, 2)));
        assert!(joined.semantic_eq(&evens));
        assert_eq!(joined.normalized(), evens);
    }

    #[test]
    fn complement_of_evens() {
        let evens = EPSet::from_class(class(0, 2, 0));
        assert_eq!(evens.complement(), EPSet::from_class(class(0, 2, 1)));
        assert!(EPSet::all().complement().is_empty());
    }

    #[test]
    fn frame_cells_cover_each_letter_once() {
        let mut frame = Frame::default();
        frame.absorb_letter(3);
        frame.absorb_class(&class(2, 3, 1));
        frame.absorb_class(&class(0, 2, 0));
        for n in 0..100 {
            let hits = frame
                .cells()
                .filter(|c| match c {
                    Cell::Letter(m) => *m == n,
                    Cell::Class(k) => k.contains(n),
                })
                .count();
            assert_eq!(hits, 1, "letter {n}");
        }
    }

    fn arb_class() -> impl Strategy<Value = ArithClass> {
        (0u64..6, 1u64..5)
            .prop_flat_map(|(k, m)| (Just(k), Just(m), 0..m))
            .prop_map(|(k, m, r)| class(k, m, r))
    }

    fn arb_set() -> impl Strategy<Value = EPSet> {
        (
            proptest::collection::btree_set(0u64..12, 0..4),
            proptest::collection::vec(arb_class(), 0..3),
        )
            .prop_map(|(explicit, classes)| EPSet { explicit, classes })
    }

    proptest! {
        #[test]
        fn normalization_preserves_membership(s in arb_set()) {
            let n = s.normalized();
            for k in 0..80 {
                prop_assert_eq!(s.contains(k), n.contains(k));
            }
            prop_assert_eq!(n.normalized(), n);
        }

        #[test]
        fn complement_partitions(s in arb_set()) {
            let c = s.complement();
            for k in 0..80 {
                prop_assert_ne!(s.contains(k), c.contains(k));
            }
        }

        #[test]
        fn subset_agrees_with_enumeration(a in arb_set(), b in arb_set()) {
            // beyond 12 + 6 + lcm(1..4)=12 every set is periodic
            let brute = (0..60).all(|k| !a.contains(k) || b.contains(k));
            prop_assert_eq!(a.is_subset(&b), brute);
        }
    }
}
