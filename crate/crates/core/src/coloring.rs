//! Exact list-colouring and b-fold list-colouring by backtracking.
//!
//! Both solvers split the uncoloured vertices into connected components and solve
//! them independently. Proper list colouring additionally hands every component that
//! is a clique to [`clique_sdr`], which decides it in polynomial time.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::lists::{Color, ColorSet, ListAssignment};
use crate::sdr::clique_sdr;

/// Node limit used by the convenience entry points.
pub const DEFAULT_COLORING_BUDGET: u64 = 200_000_000;

/// Colour per vertex.
pub type Coloring = Vec<Color>;

/// `assignment[v]` is a set of `b` colours; adjacent sets are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldColoring {
    pub b: usize,
    pub assignment: Vec<ColorSet>,
}

/// True iff `c` colours every vertex from its list and no edge is monochromatic.
pub fn is_proper_list_coloring(g: &Graph, l: &ListAssignment, c: &[Color]) -> bool {
    c.len() == g.n()
        && (0..g.n()).all(|v| l.get(v).contains(&c[v]))
        && g.edges().iter().all(|&(u, v)| c[u] != c[v])
}

pub fn is_fold_coloring(g: &Graph, l: &ListAssignment, f: &FoldColoring) -> bool {
    f.assignment.len() == g.n()
        && f.assignment
            .iter()
            .enumerate()
            .all(|(v, s)| s.len() == f.b && s.is_subset(l.get(v)))
        && g.edges()
            .iter()
            .all(|&(u, v)| f.assignment[u].is_disjoint(&f.assignment[v]))
}

/// An L-colouring of `g` extending `partial`, or `None` after exhaustive search.
pub fn find_coloring(
    g: &Graph,
    l: &ListAssignment,
    partial: Option<&BTreeMap<Vertex, Color>>,
) -> Result<Option<Coloring>> {
    find_coloring_budgeted(g, l, partial, DEFAULT_COLORING_BUDGET)
}

pub fn find_coloring_budgeted(
    g: &Graph,
    l: &ListAssignment,
    partial: Option<&BTreeMap<Vertex, Color>>,
    budget: u64,
) -> Result<Option<Coloring>> {
    l.check_carrier(g)?;
    let mut out: Vec<Option<Color>> = vec![None; g.n()];
    if let Some(p) = partial {
        for (&v, &c) in p {
            if v >= g.n() {
                return Err(Error::invalid(format!("partial colours vertex {v}, out of range")));
            }
            if !l.get(v).contains(&c) {
                return Err(Error::invalid(format!("partial colour {c} not in the list of vertex {v}")));
            }
            if let Some((&u, _)) = p.iter().find(|(&u, &cu)| cu == c && u != v && g.has_edge(u, v)) {
                return Err(Error::invalid(format!("partial colouring is improper on edge ({u},{v})")));
            }
            out[v] = Some(c);
        }
    }
    let mut dom: Vec<Vec<Color>> = (0..g.n())
        .map(|v| {
            l.get(v)
                .iter()
                .copied()
                .filter(|c| !g.neighbors(v).ones().any(|u| out[u] == Some(*c)))
                .collect()
        })
        .collect();
    let mut free = FixedBitSet::with_capacity(g.n());
    for v in 0..g.n() {
        if out[v].is_none() {
            free.insert(v);
        }
    }
    let mut s = ListSolver {
        g,
        nodes: 0,
        budget,
    };
    if s.solve(&free, &mut dom, &mut out)? {
        Ok(Some(out.into_iter().map(|c| c.expect("every vertex coloured")).collect()))
    } else {
        Ok(None)
    }
}

struct ListSolver<'g> {
    g: &'g Graph,
    nodes: u64,
    budget: u64,
}

impl ListSolver<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    fn solve(&mut self, free: &FixedBitSet, dom: &mut [Vec<Color>], out: &mut [Option<Color>]) -> Result<bool> {
        for comp in self.g.components_within(free) {
            if !self.solve_component(&comp, dom, out)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn solve_component(&mut self, comp: &[Vertex], dom: &mut [Vec<Color>], out: &mut [Option<Color>]) -> Result<bool> {
        self.tick()?;
        if comp.iter().any(|&v| dom[v].is_empty()) {
            return Ok(false);
        }
        let mut set = FixedBitSet::with_capacity(self.g.n());
        for &v in comp {
            set.insert(v);
        }
        let is_clique = comp
            .iter()
            .all(|&v| self.g.neighbors(v).intersection(&set).count() == comp.len() - 1);
        if is_clique {
            let lists: Vec<ColorSet> = comp.iter().map(|&v| dom[v].iter().copied().collect()).collect();
            return Ok(match clique_sdr(&lists).representatives() {
                Some(reps) => {
                    for (&v, &c) in comp.iter().zip(reps) {
                        out[v] = Some(c);
                    }
                    true
                }
                None => false,
            });
        }
        let v = *comp
            .iter()
            .min_by_key(|&&v| (dom[v].len(), v))
            .expect("component is nonempty");
        set.set(v, false);
        let nbrs: Vec<Vertex> = self.g.neighbors(v).intersection(&set).collect();
        for c in dom[v].clone() {
            out[v] = Some(c);
            let mut removed = Vec::new();
            let mut wiped = false;
            for &w in &nbrs {
                if let Ok(pos) = dom[w].binary_search(&c) {
                    dom[w].remove(pos);
                    removed.push(w);
                    wiped |= dom[w].is_empty();
                }
            }
            let ok = !wiped && self.solve(&set, dom, out)?;
            for w in removed {
                let pos = dom[w].binary_search(&c).unwrap_err();
                dom[w].insert(pos, c);
            }
            if ok {
                return Ok(true);
            }
        }
        out[v] = None;
        Ok(false)
    }
}

/// A b-fold L-colouring extending `partial`, or `None` after exhaustive search.
/// A list shorter than `b` gives `None` immediately.
pub fn find_bfold(
    g: &Graph,
    l: &ListAssignment,
    b: usize,
    partial: Option<&BTreeMap<Vertex, ColorSet>>,
) -> Result<Option<FoldColoring>> {
    if b == 0 {
        return Err(Error::invalid("b must be at least 1"));
    }
    l.check_carrier(g)?;
    let mut out: Vec<Option<ColorSet>> = vec![None; g.n()];
    if let Some(p) = partial {
        for (&v, s) in p {
            if v >= g.n() || s.len() != b || !s.is_subset(l.get(v)) {
                return Err(Error::invalid(format!("partial fold colouring invalid at vertex {v}")));
            }
            if let Some((&u, _)) = p.iter().find(|(&u, su)| u != v && g.has_edge(u, v) && !su.is_disjoint(s)) {
                return Err(Error::invalid(format!("partial fold colouring improper on edge ({u},{v})")));
            }
            out[v] = Some(s.clone());
        }
    }
    if l.lists.iter().any(|list| list.len() < b) {
        return Ok(None);
    }
    let mut dom: Vec<ColorSet> = (0..g.n())
        .map(|v| {
            let mut d = l.get(v).clone();
            for u in g.neighbors(v).ones() {
                if let Some(s) = &out[u] {
                    d.retain(|c| !s.contains(c));
                }
            }
            d
        })
        .collect();
    let mut free = FixedBitSet::with_capacity(g.n());
    for v in 0..g.n() {
        if out[v].is_none() {
            free.insert(v);
        }
    }
    let mut s = FoldSolver {
        g,
        b,
        nodes: 0,
        budget: DEFAULT_COLORING_BUDGET,
    };
    if s.solve(&free, &mut dom, &mut out)? {
        Ok(Some(FoldColoring {
            b,
            assignment: out.into_iter().map(|s| s.expect("every vertex coloured")).collect(),
        }))
    } else {
        Ok(None)
    }
}

struct FoldSolver<'g> {
    g: &'g Graph,
    b: usize,
    nodes: u64,
    budget: u64,
}

impl FoldSolver<'_> {
    fn solve(&mut self, free: &FixedBitSet, dom: &mut [ColorSet], out: &mut [Option<ColorSet>]) -> Result<bool> {
        for comp in self.g.components_within(free) {
            if !self.solve_component(&comp, dom, out)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn solve_component(&mut self, comp: &[Vertex], dom: &mut [ColorSet], out: &mut [Option<ColorSet>]) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if comp.iter().any(|&v| dom[v].len() < self.b) {
            return Ok(false);
        }
        let v = *comp
            .iter()
            .min_by_key(|&&v| (dom[v].len(), v))
            .expect("component is nonempty");
        let mut rest = FixedBitSet::with_capacity(self.g.n());
        for &u in comp {
            if u != v {
                rest.insert(u);
            }
        }
        let nbrs: Vec<Vertex> = self.g.neighbors(v).intersection(&rest).collect();
        let options: Vec<Vec<Color>> = dom[v].iter().copied().combinations(self.b).collect();
        for choice in options {
            let mut removed: Vec<(Vertex, Color)> = Vec::new();
            let mut starved = false;
            for &w in &nbrs {
                for &c in &choice {
                    if dom[w].remove(&c) {
                        removed.push((w, c));
                    }
                }
                starved |= dom[w].len() < self.b;
            }
            out[v] = Some(choice.iter().copied().collect());
            let ok = !starved && self.solve(&rest, dom, out)?;
            for (w, c) in removed {
                dom[w].insert(c);
            }
            if ok {
                return Ok(true);
            }
        }
        out[v] = None;
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[Color]) -> ColorSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn triangle_with_three_colours() {
        let g = Graph::complete(3);
        let l = ListAssignment::uniform(3, &set(&[1, 2, 3]));
        let c = find_coloring(&g, &l, None).unwrap().unwrap();
        assert!(is_proper_list_coloring(&g, &l, &c));
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3]);
    }

    #[test]
    fn k4_from_three_colours_fails() {
        let g = Graph::complete(4);
        let l = ListAssignment::uniform(4, &set(&[1, 2, 3]));
        assert_eq!(find_coloring(&g, &l, None).unwrap(), None);
    }

    #[test]
    fn odd_cycle_needs_three() {
        let g = Graph::cycle(5);
        let l = ListAssignment::uniform(5, &set(&[1, 2]));
        assert_eq!(find_coloring(&g, &l, None).unwrap(), None);
        let l3 = ListAssignment::uniform(5, &set(&[1, 2, 3]));
        assert!(find_coloring(&g, &l3, None).unwrap().is_some());
    }

    #[test]
    fn partial_colouring_is_respected_and_validated() {
        let g = Graph::path(3);
        let l = ListAssignment::uniform(3, &set(&[1, 2]));
        let partial: BTreeMap<_, _> = [(0, 2)].into_iter().collect();
        let c = find_coloring(&g, &l, Some(&partial)).unwrap().unwrap();
        assert_eq!(c, vec![2, 1, 2]);
        let bad: BTreeMap<_, _> = [(0, 5)].into_iter().collect();
        assert!(find_coloring(&g, &l, Some(&bad)).is_err());
        let clash: BTreeMap<_, _> = [(0, 1), (1, 1)].into_iter().collect();
        assert!(find_coloring(&g, &l, Some(&clash)).is_err());
    }

    #[test]
    fn five_cycle_two_fold() {
        let g = Graph::cycle(5);
        let l = ListAssignment::uniform(5, &set(&[1, 2, 3, 4, 5]));
        let f = find_bfold(&g, &l, 2, None).unwrap().unwrap();
        assert!(is_fold_coloring(&g, &l, &f));
        let l4 = ListAssignment::uniform(5, &set(&[1, 2, 3, 4]));
        assert_eq!(find_bfold(&g, &l4, 2, None).unwrap(), None);
    }

    #[test]
    fn edge_two_fold_from_two_colours() {
        let g = Graph::complete(2);
        let l = ListAssignment::uniform(2, &set(&[1, 2]));
        assert_eq!(find_bfold(&g, &l, 2, None).unwrap(), None);
        let short = ListAssignment::uniform(2, &set(&[1]));
        assert_eq!(find_bfold(&g, &short, 2, None).unwrap(), None);
        assert!(find_bfold(&g, &l, 0, None).is_err());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g = Graph::cycle(7);
        let l = ListAssignment::uniform(7, &set(&[1, 2]));
        assert!(matches!(
            find_coloring_budgeted(&g, &l, None, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
