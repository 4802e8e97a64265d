//! Systems of distinct representatives via bipartite matching.
//!
//! List-colouring a clique is exactly choosing an SDR of its lists, so this is the
//! fast path for every clique carrier in the colouring solvers. When no SDR exists
//! the result carries a Hall violator: lists whose union is smaller than their count.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lists::{Color, ColorSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SdrOutcome {
    /// `representatives[i]` is drawn from list `i`, all distinct.
    Found { representatives: Vec<Color> },
    /// `|union of lists[i] for i in lists| = colors.len() < lists.len()`.
    HallViolator { lists: Vec<usize>, colors: ColorSet },
}

impl SdrOutcome {
    pub fn representatives(&self) -> Option<&[Color]> {
        match self {
            SdrOutcome::Found { representatives } => Some(representatives),
            SdrOutcome::HallViolator { .. } => None,
        }
    }
}

/// Maximum matching between lists and colours (augmenting paths, lists in order,
/// colours ascending).
pub fn clique_sdr(lists: &[ColorSet]) -> SdrOutcome {
    let mut index: BTreeMap<Color, usize> = BTreeMap::new();
    for l in lists {
        for &c in l {
            let next = index.len();
            index.entry(c).or_insert(next);
        }
    }
    let colors: Vec<Color> = {
        let mut v = vec![0; index.len()];
        for (&c, &i) in &index {
            v[i] = c;
        }
        v
    };
    let adj: Vec<Vec<usize>> = lists
        .iter()
        .map(|l| l.iter().map(|c| index[c]).collect())
        .collect();

    let mut color_owner: Vec<Option<usize>> = vec![None; colors.len()];
    let mut list_match: Vec<Option<usize>> = vec![None; lists.len()];
    let mut stamp = vec![usize::MAX; colors.len()];
    for i in 0..lists.len() {
        if augment(i, i, &adj, &mut color_owner, &mut list_match, &mut stamp) {
            continue;
        }
    }

    if list_match.iter().all(Option::is_some) {
        return SdrOutcome::Found {
            representatives: list_match.iter().map(|m| colors[m.unwrap()]).collect(),
        };
    }

    // Alternating reachability from every unmatched list.
    let mut seen_list = vec![false; lists.len()];
    let mut seen_color = vec![false; colors.len()];
    let mut stack: Vec<usize> = (0..lists.len()).filter(|&i| list_match[i].is_none()).collect();
    for &i in &stack {
        seen_list[i] = true;
    }
    while let Some(i) = stack.pop() {
        for &c in &adj[i] {
            if !seen_color[c] {
                seen_color[c] = true;
                if let Some(j) = color_owner[c] {
                    if !seen_list[j] {
                        seen_list[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    SdrOutcome::HallViolator {
        lists: (0..lists.len()).filter(|&i| seen_list[i]).collect(),
        colors: (0..colors.len())
            .filter(|&c| seen_color[c])
            .map(|c| colors[c])
            .collect(),
    }
}

fn augment(
    i: usize,
    round: usize,
    adj: &[Vec<usize>],
    color_owner: &mut [Option<usize>],
    list_match: &mut [Option<usize>],
    stamp: &mut [usize],
) -> bool {
    for &c in &adj[i] {
        if stamp[c] == round {
            continue;
        }
        stamp[c] = round;
        let free = match color_owner[c] {
            None => true,
            Some(j) => augment(j, round, adj, color_owner, list_match, stamp),
        };
        if free {
            color_owner[c] = Some(i);
            list_match[i] = Some(c);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[Color]) -> ColorSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn two_lists_two_colours() {
        assert_eq!(
            clique_sdr(&[set(&[1, 2]), set(&[1, 2])]),
            SdrOutcome::Found {
                representatives: vec![2, 1]
            }
        );
    }

    #[test]
    fn identical_singletons_collide() {
        assert_eq!(
            clique_sdr(&[set(&[1]), set(&[1])]),
            SdrOutcome::HallViolator {
                lists: vec![0, 1],
                colors: set(&[1])
            }
        );
    }

    #[test]
    fn fifty_lists_in_a_pool_of_forty_nine() {
        let pool: Vec<Color> = (0..49).collect();
        let lists: Vec<ColorSet> = (0..50)
            .map(|i| pool.iter().copied().filter(|c| (c + i) % 7 != 0).collect())
            .collect();
        match clique_sdr(&lists) {
            SdrOutcome::HallViolator { lists, colors } => {
                assert_eq!(lists.len(), 50);
                assert!(colors.len() < 50);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_family_has_empty_sdr() {
        assert_eq!(
            clique_sdr(&[]),
            SdrOutcome::Found {
                representatives: vec![]
            }
        );
    }

    #[test]
    fn violator_ignores_unrelated_lists() {
        let out = clique_sdr(&[set(&[9]), set(&[1]), set(&[1]), set(&[2, 3])]);
        assert_eq!(
            out,
            SdrOutcome::HallViolator {
                lists: vec![1, 2],
                colors: set(&[1])
            }
        );
    }
}
