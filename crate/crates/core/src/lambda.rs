//! Multisets of positive integers (`λ`), their text form, and the refinement order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A multiset of positive parts, stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lambda {
    parts: Vec<u32>,
}

impl Lambda {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("lambda needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::invalid("lambda parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Lambda { parts })
    }

    /// `value ⋆ multiplicity` pairs.
    pub fn from_runs(runs: &[(u32, usize)]) -> Result<Self> {
        Lambda::new(
            runs.iter()
                .flat_map(|&(v, m)| std::iter::repeat(v).take(m))
                .collect(),
        )
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn k(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, value: u32) -> usize {
        self.parts.iter().filter(|&&p| p == value).count()
    }

    /// Ascending `(value, multiplicity)` runs.
    pub fn runs(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in self.parts.iter().rev() {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .runs()
            .into_iter()
            .map(|(v, m)| if m == 1 { v.to_string() } else { format!("{v}*{m}") })
            .collect();
        f.write_str(&text.join(","))
    }
}

/// Parses `part(,part)*` where a part is `INT` or `INT*INT` (value, multiplicity).
pub fn parse_lambda(text: &str) -> Result<Lambda> {
    let mut parts = Vec::new();
    let mut pos = 0;
    for piece in text.split(',') {
        let start = pos + (piece.len() - piece.trim_start().len());
        let trimmed = piece.trim();
        let (value, mult) = match trimmed.split_once('*') {
            Some((v, m)) => (
                parse_positive(v.trim(), start)?,
                parse_positive(m.trim(), start + v.len() + 1)?,
            ),
            None => (parse_positive(trimmed, start)?, 1),
        };
        parts.extend(std::iter::repeat(value).take(mult as usize));
        pos += piece.len() + 1;
    }
    Lambda::new(parts)
}

fn parse_positive(s: &str, pos: usize) -> Result<u32> {
    let v: i64 = s.parse().map_err(|_| Error::Parse {
        pos,
        msg: format!("expected an integer, found {s:?}"),
    })?;
    if v <= 0 {
        return Err(Error::Parse {
            pos,
            msg: format!("parts and multiplicities must be positive, found {v}"),
        });
    }
    u32::try_from(v).map_err(|_| Error::Parse {
        pos,
        msg: format!("{v} is too large"),
    })
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_lambda(s)
    }
}

impl serde::Serialize for Lambda {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Lambda {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_lambda(&s).map_err(serde::de::Error::custom)
    }
}

/// `lhs ≤ rhs`: `rhs` is reached from `lhs` by a chain of refinements and part
/// increases.
///
/// Equivalently the parts of `rhs` can be grouped, one non-empty group per part `k` of
/// `lhs`, each group summing to at least `k` (raise `k` to the group sum, then split).
/// When both sides sum to the same total every group sums to exactly `k`, so this is
/// a single refinement followed by increases. Decided by exhaustive grouping search
/// with memoised dead states.
pub fn leq_order(lhs: &Lambda, rhs: &Lambda) -> bool {
    if rhs.len() < lhs.len() || rhs.k() < lhs.k() {
        return false;
    }
    let mut groups: Vec<Group> = lhs
        .parts
        .iter()
        .map(|&k| Group { need: k, sum: 0 })
        .collect();
    let mut dead = HashSet::new();
    assign_parts(&rhs.parts, 0, &mut groups, &mut dead)
}

#[derive(Clone, Copy)]
struct Group {
    need: u32,
    sum: u32,
}

fn assign_parts(
    rhs: &[u32],
    idx: usize,
    groups: &mut [Group],
    dead: &mut HashSet<(usize, Vec<(u32, u32)>)>,
) -> bool {
    let unfilled = groups.iter().filter(|g| g.sum < g.need).count();
    if rhs.len() - idx < unfilled {
        return false;
    }
    if idx == rhs.len() {
        return unfilled == 0;
    }
    let mut key: Vec<(u32, u32)> = groups
        .iter()
        .map(|g| (g.need, g.sum.min(g.need)))
        .collect();
    key.sort_unstable();
    let key = (idx, key);
    if dead.contains(&key) {
        return false;
    }
    let part = rhs[idx];
    let mut tried: HashSet<(u32, u32)> = HashSet::new();
    for i in 0..groups.len() {
        let g = groups[i];
        if !tried.insert((g.need, g.sum.min(g.need))) {
            continue;
        }
        groups[i].sum += part;
        let ok = assign_parts(rhs, idx + 1, groups, dead);
        groups[i] = g;
        if ok {
            return true;
        }
    }
    dead.insert(key);
    false
}

/// All partitions of `k`, each non-increasing, in reverse lexicographic order.
pub fn partitions(k: u32) -> Vec<Lambda> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Lambda>) {
        if rest == 0 {
            out.push(Lambda { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Lambda {
        parse_lambda(s).unwrap()
    }

    #[test]
    fn parse_star_notation() {
        let lam = l("1*46,6");
        assert_eq!(lam.k(), 52);
        assert_eq!(lam.len(), 47);
        assert_eq!(lam.parts()[0], 6);
        assert_eq!(lam.to_string(), "1*46,6");
        assert_eq!(l("4").parts(), &[4]);
        assert_eq!(l(" 3 , 1*2 ").to_string(), "1*2,3");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_lambda("1*0,3") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_lambda("2,-1") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_lambda("").is_err());
        assert!(parse_lambda("a").is_err());
    }

    #[test]
    fn order_examples() {
        assert!(leq_order(&l("4"), &l("1,1,2")));
        assert!(!leq_order(&l("1,1,2"), &l("4")));
        assert!(leq_order(&l("1,3"), &l("2,3")));
        assert!(leq_order(&l("1,1,4"), &l("1*4,2")));
        // 1*3,2 sums to 5 < 6, no refinement of 1,1,4 fits under it
        assert!(!leq_order(&l("1,1,4"), &l("1*3,2")));
        assert!(!leq_order(&l("1*3"), &l("3")));
        assert!(leq_order(&l("5"), &l("1*5")));
        // {1} -> {2} -> {1,1}: only the chain reaches it
        assert!(leq_order(&l("1"), &l("2")) && leq_order(&l("2"), &l("1*2")));
        assert!(leq_order(&l("1"), &l("1*2")));
        assert!(!leq_order(&l("1*5"), &l("5")));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|k| partitions(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn every_partition_of_six_below_one_star_four_two() {
        let top = l("1*4,2");
        for lam in partitions(6) {
            if lam == l("1*6") {
                assert!(!leq_order(&lam, &top));
            } else {
                assert!(leq_order(&lam, &top), "{lam}");
            }
        }
    }
}
