//! Leftmost uniformization: the lexicographically least `y` with `(x, y)` a
//! branch, for an eventually periodic `x`.

use std::collections::BTreeMap;

use crate::epset::lcm;
use crate::error::{Error, Result};
use crate::ntree::StateId;
use crate::pairtree::{PairRule, PairTree};
use crate::point::EPPoint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uniformization {
    pub y: EPPoint,
    /// Non-compact section warnings: reached states where the section has
    /// infinitely many y-letters.
    pub warnings: Vec<String>,
    /// `|states| × lcm(x period, move moduli)`; the period of `y` never
    /// exceeds it.
    pub period_bound: u64,
}

/// Section automaton liveness: `(q, pos)` is live when the section of `S`
/// at state `q`, reading `x` from position `pos`, has an infinite branch.
fn live_positions(s: &PairTree, x: &EPPoint) -> Vec<Vec<bool>> {
    let positions = x.position_count();
    let mut live = vec![vec![true; positions]; s.len()];
    loop {
        let mut changed = false;
        for q in 0..s.len() {
            for pos in 0..positions {
                if !live[q][pos] {
                    continue;
                }
                let a = x.letter_at_position(pos);
                let next = x.next_position(pos);
                if !s.x_targets(q, a).any(|t| live[t][next]) {
                    live[q][pos] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return live;
        }
    }
}

/// The leftmost `y` with `(x, y) ∈ [S]`, greedily taking the least
/// y-letter that keeps a continuation.
pub fn leftmost_uniformize(s: &PairTree, x: &EPPoint) -> Result<Uniformization> {
    let live = live_positions(s, x);
    if !live[s.start()][0] {
        return Err(Error::EmptySection);
    }
    let mut warnings = Vec::new();
    let mut seen: BTreeMap<(StateId, usize), usize> = BTreeMap::new();
    let mut ys = Vec::new();
    let (mut q, mut pos) = (s.start(), 0usize);
    let repeat_at = loop {
        if let Some(&i) = seen.get(&(q, pos)) {
            break i;
        }
        seen.insert((q, pos), ys.len());
        let a = x.letter_at_position(pos);
        let next = x.next_position(pos);
        let moves = s
            .state(q)
            .rules
            .iter()
            .filter(|(r, t)| r.applies_x(a) && live[*t][next]);
        let mut best: Option<(u64, StateId)> = None;
        for (r, t) in moves {
            if matches!(r, PairRule::YTail { .. }) {
                warnings.push(format!(
                    "non-compact section at state {} after {} letters",
                    s.name(q),
                    ys.len()
                ));
            }
            let y = r.least_y(a).expect("rule applies");
            if best.is_none_or(|(b, _)| y < b) {
                best = Some((y, *t));
            }
        }
        let (y, t) = best.expect("live position has a live move");
        ys.push(y);
        q = t;
        pos = next;
    };
    let period = ys.split_off(repeat_at);
    let y = EPPoint::new(ys, period)?.normalized();
    let period_bound = s.len() as u64 * lcm(x.period().len() as u64, s.modulus());
    Ok(Uniformization {
        y,
        warnings,
        period_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntree::fixtures::class;
    use crate::pairtree::fixtures::*;
    use crate::pairtree::PairTreeBuilder;
    use crate::snapshot::truncate_enumerate;

    fn point(s: &str) -> EPPoint {
        s.parse().unwrap()
    }

    #[test]
    fn documented_examples() {
        let u = leftmost_uniformize(&diag(), &point("(5)")).unwrap();
        assert_eq!(u.y, point("(5)"));
        assert!(u.warnings.is_empty());
        let u = leftmost_uniformize(&half(), &point("2,(7)")).unwrap();
        assert_eq!(u.y, point("0,(7)"));
        assert_eq!(
            leftmost_uniformize(&half(), &point("1,(0)")),
            Err(Error::EmptySection)
        );
    }

    #[test]
    fn greedy_choice_avoids_dead_ends() {
        // y = 0 at the first step leads to a state that rejects x-letter 1
        let s = PairTreeBuilder::new()
            .state("a")
            .state("dead")
            .state("ok")
            .start("a")
            .edge("a", 1, 0, "dead")
            .edge("a", 1, 3, "ok")
            .edge("dead", 0, 0, "dead")
            .dtail("ok", class(0, 1, 0), "ok")
            .build()
            .unwrap();
        let u = leftmost_uniformize(&s, &point("(1)")).unwrap();
        assert_eq!(u.y, point("3,(1)"));
    }

    #[test]
    fn infinite_sections_warn() {
        let s = PairTreeBuilder::new()
            .state("a")
            .start("a")
            .ytail("a", 0, class(2, 1, 0), "a")
            .build()
            .unwrap();
        let u = leftmost_uniformize(&s, &point("(0)")).unwrap();
        assert_eq!(u.y, point("(2)"));
        assert!(!u.warnings.is_empty());
    }

    #[test]
    fn matches_section_minimum() {
        for (s, x) in [(half(), point("4,(1,2)")), (diag(), point("3,(0,9)"))] {
            let y = leftmost_uniformize(&s, &x).unwrap().y;
            let snap = truncate_enumerate(&s, 5, 10).unwrap();
            let least = snap
                .members
                .iter()
                .filter(|(u, _)| u.len() == 5 && u[..] == x.take(5)[..])
                .map(|(_, v)| v.clone())
                .min()
                .unwrap();
            assert_eq!(least, y.take(5));
        }
    }
}
