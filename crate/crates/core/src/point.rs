use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An eventually periodic point of Baire space: `prefix` followed by
/// `period` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EPPoint {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

impl EPPoint {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Validation("point period must be nonempty".into()));
        }
        Ok(EPPoint { prefix, period })
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn at(&self, i: usize) -> u64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// `x↾n`.
    pub fn take(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Number of distinct positions before the run repeats: positions in the
    /// prefix, then positions in the period.
    pub fn position_count(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Position index of the letter after position `pos`.
    pub fn next_position(&self, pos: usize) -> usize {
        let next = pos + 1;
        if next < self.position_count() {
            next
        } else {
            self.prefix.len()
        }
    }

    /// Letter at a position index (see [`EPPoint::position_count`]).
    pub fn letter_at_position(&self, pos: usize) -> u64 {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.period[pos - self.prefix.len()]
        }
    }

    /// Shortest period, then shortest prefix.
    pub fn normalized(&self) -> EPPoint {
        let n = self.period.len();
        let root = (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (0..n).all(|i| self.period[i] == self.period[i % d]))
            .unwrap_or(n);
        let mut period: Vec<u64> = self.period[..root].to_vec();
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        EPPoint { prefix, period }
    }

    pub fn semantic_eq(&self, other: &EPPoint) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for EPPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.prefix {
            write!(f, "{a},")?;
        }
        write!(f, "(")?;
        for (i, a) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

fn parse_letters(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Validation(format!("bad letter {t:?} in point literal")))
        })
        .collect()
}

impl FromStr for EPPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Validation("point literal needs a parenthesized period".into()))?;
        let close = s
            .rfind(')')
            .filter(|&c| c > open && s[c + 1..].trim().is_empty())
            .ok_or_else(|| Error::Validation("point literal must end with ')'".into()))?;
        let head = s[..open].trim();
        if !head.is_empty() && !head.ends_with(',') {
            return Err(Error::Validation("prefix must be followed by ','".into()));
        }
        EPPoint::new(parse_letters(head)?, parse_letters(&s[open + 1..close])?)
    }
}

impl TryFrom<String> for EPPoint {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EPPoint> for String {
    fn from(p: EPPoint) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn literal_syntax() {
        let p: EPPoint = "2,(7)".parse().unwrap();
        assert_eq!(p.prefix(), &[2]);
        assert_eq!(p.period(), &[7]);
        assert_eq!(p.to_string(), "2,(7)");
        let q: EPPoint = "(5)".parse().unwrap();
        assert_eq!(q.take(3), vec![5, 5, 5]);
        assert!("1,2".parse::<EPPoint>().is_err());
        assert!("1,()".parse::<EPPoint>().is_err());
    }

    #[test]
    fn normalization() {
        let p = EPPoint::new(vec![1, 7, 7], vec![7, 7]).unwrap();
        assert_eq!(p.normalized().to_string(), "1,(7)");
        let q = EPPoint::new(vec![3, 2, 4], vec![2, 4]).unwrap();
        assert_eq!(q.normalized().to_string(), "3,(2,4)");
    }

    proptest! {
        #[test]
        fn normalization_preserves_points(
            prefix in proptest::collection::vec(0u64..3, 0..5),
            period in proptest::collection::vec(0u64..3, 1..5),
        ) {
            let p = EPPoint::new(prefix, period).unwrap();
            let n = p.normalized();
            prop_assert_eq!(p.take(40), n.take(40));
            prop_assert!(n.position_count() <= p.position_count());
            let reparsed: EPPoint = p.to_string().parse().unwrap();
            prop_assert_eq!(reparsed, p);
        }
    }
}
