//! Exact K_t-minor search with checkable branch-set certificates.
//!
//! A search either returns a [`MinorModel`], proves absence (`Ok(None)`), or stops with
//! [`Error::BudgetExceeded`]; running out of budget is never reported as absence.
//!
//! Strategies implement [`MinorStrategy`] and are looked up by name in a
//! [`MinorRegistry`]. The default entry point [`find_kt_minor`] uses [`AutoStrategy`],
//! which splits the graph into biconnected blocks and picks per block between the
//! low-deficiency enumerator and general branch-and-bound.

mod blocks;
mod branch;
mod deficiency;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

pub use blocks::biconnected_blocks;
pub use branch::BranchAndBound;
pub use deficiency::LowDeficiency;

/// Default node limit for searches started without an explicit budget.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// `t` pairwise disjoint, connected, pairwise adjacent branch sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub branch_sets: Vec<Vec<Vertex>>,
}

impl MinorModel {
    pub fn t(&self) -> usize {
        self.branch_sets.len()
    }

    /// Sorts each branch set and orders the sets by their smallest vertex.
    pub fn canonical(mut self) -> Self {
        for s in &mut self.branch_sets {
            s.sort_unstable();
        }
        self.branch_sets.sort();
        self
    }

    fn remap(self, ids: &[Vertex]) -> Self {
        MinorModel {
            branch_sets: self
                .branch_sets
                .into_iter()
                .map(|s| s.into_iter().map(|v| ids[v]).collect())
                .collect(),
        }
        .canonical()
    }
}

/// Why a claimed model is not a K_t-minor model of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelDefect {
    EmptySet(usize),
    OutOfRange(Vertex),
    Overlap { vertex: Vertex },
    Disconnected(usize),
    NotAdjacent(usize, usize),
}

impl std::fmt::Display for ModelDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelDefect::EmptySet(i) => write!(f, "branch set {i} is empty"),
            ModelDefect::OutOfRange(v) => write!(f, "vertex {v} out of range"),
            ModelDefect::Overlap { vertex } => write!(f, "vertex {vertex} lies in two branch sets"),
            ModelDefect::Disconnected(i) => write!(f, "branch set {i} is not connected"),
            ModelDefect::NotAdjacent(i, j) => write!(f, "branch sets {i} and {j} are not joined by an edge"),
        }
    }
}

/// Checks the three model conditions, reporting the first defect found.
pub fn check_minor_model(g: &Graph, m: &MinorModel) -> std::result::Result<(), ModelDefect> {
    let mut owner = vec![usize::MAX; g.n()];
    let mut sets = Vec::with_capacity(m.t());
    for (i, s) in m.branch_sets.iter().enumerate() {
        if s.is_empty() {
            return Err(ModelDefect::EmptySet(i));
        }
        let mut bits = FixedBitSet::with_capacity(g.n());
        for &v in s {
            if v >= g.n() {
                return Err(ModelDefect::OutOfRange(v));
            }
            if owner[v] != usize::MAX {
                return Err(ModelDefect::Overlap { vertex: v });
            }
            owner[v] = i;
            bits.insert(v);
        }
        if !g.is_connected_set(&bits) {
            return Err(ModelDefect::Disconnected(i));
        }
        sets.push(bits);
    }
    for i in 0..sets.len() {
        let mut reach = FixedBitSet::with_capacity(g.n());
        for v in sets[i].ones() {
            reach.union_with(g.neighbors(v));
        }
        for (j, sj) in sets.iter().enumerate().skip(i + 1) {
            if reach.is_disjoint(sj) {
                return Err(ModelDefect::NotAdjacent(i, j));
            }
        }
    }
    Ok(())
}

pub fn verify_minor_model(g: &Graph, m: &MinorModel) -> bool {
    check_minor_model(g, m).is_ok()
}

/// Node counter shared by every stage of one search.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

pub trait MinorStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether the strategy is meant for this instance; strategies still answer
    /// exactly outside their regime, only slower.
    fn suited(&self, g: &Graph, t: usize) -> bool;

    /// Exhaustive search for a K_t minor, `t >= 1`.
    fn search(&self, g: &Graph, t: usize, budget: &mut Budget) -> Result<Option<MinorModel>>;
}

/// Blocks first, then low-deficiency enumeration when `|block| - t` is small and
/// branch-and-bound otherwise.
pub struct AutoStrategy {
    low: LowDeficiency,
    general: BranchAndBound,
}

impl Default for AutoStrategy {
    fn default() -> Self {
        AutoStrategy {
            low: LowDeficiency::default(),
            general: BranchAndBound,
        }
    }
}

impl MinorStrategy for AutoStrategy {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn suited(&self, _g: &Graph, _t: usize) -> bool {
        true
    }

    fn search(&self, g: &Graph, t: usize, budget: &mut Budget) -> Result<Option<MinorModel>> {
        if let Some(trivial) = trivial_cases(g, t) {
            return Ok(trivial);
        }
        // K_t is 2-connected for t >= 3, so any model lives inside one block.
        for block in biconnected_blocks(g) {
            if block.len() < t {
                continue;
            }
            let h = g.induced(&block);
            if h.edge_count() < t * (t - 1) / 2 {
                continue;
            }
            let found = if self.low.suited(&h, t) {
                self.low.search(&h, t, budget)?
            } else {
                self.general.search(&h, t, budget)?
            };
            if let Some(m) = found {
                return Ok(Some(m.remap(&block)));
            }
        }
        Ok(None)
    }
}

/// Answers `t <= 2` and `t > n` directly.
pub(crate) fn trivial_cases(g: &Graph, t: usize) -> Option<Option<MinorModel>> {
    if t > g.n() {
        return Some(None);
    }
    match t {
        1 => Some(Some(MinorModel {
            branch_sets: vec![vec![0]],
        })),
        2 => Some(g.edges().first().map(|&(u, v)| MinorModel {
            branch_sets: vec![vec![u], vec![v]],
        })),
        _ => None,
    }
}

/// Strategies by name.
pub struct MinorRegistry {
    entries: BTreeMap<&'static str, Box<dyn MinorStrategy>>,
}

impl Default for MinorRegistry {
    fn default() -> Self {
        let mut r = MinorRegistry {
            entries: BTreeMap::new(),
        };
        r.register(Box::new(AutoStrategy::default()));
        r.register(Box::new(LowDeficiency::default()));
        r.register(Box::new(BranchAndBound));
        r
    }
}

impl MinorRegistry {
    pub fn register(&mut self, s: Box<dyn MinorStrategy>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Option<&dyn MinorStrategy> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// Exact K_t-minor search with the automatic strategy.
pub fn find_kt_minor(g: &Graph, t: usize, budget: u64) -> Result<Option<MinorModel>> {
    find_kt_minor_with(&AutoStrategy::default(), g, t, budget)
}

pub fn find_kt_minor_with(
    strategy: &dyn MinorStrategy,
    g: &Graph,
    t: usize,
    budget: u64,
) -> Result<Option<MinorModel>> {
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    let mut b = Budget::new(budget);
    let found = strategy.search(g, t, &mut b)?;
    if let Some(m) = &found {
        debug_assert!(verify_minor_model(g, m), "strategy {} returned an invalid model", strategy.name());
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k5_singletons() {
        let m = find_kt_minor(&Graph::complete(5), 5, 1000).unwrap().unwrap();
        assert_eq!(m.branch_sets, (0..5).map(|v| vec![v]).collect::<Vec<_>>());
    }

    #[test]
    fn paths_have_no_triangle_minor() {
        assert_eq!(find_kt_minor(&Graph::path(4), 3, 1000).unwrap(), None);
    }

    #[test]
    fn petersen_has_k5() {
        let g = Graph::petersen();
        let m = find_kt_minor(&g, 5, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(verify_minor_model(&g, &m));
        assert_eq!(find_kt_minor(&g, 7, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn petersen_matching_contraction_model() {
        // contract the spokes i -- i+5
        let m = MinorModel {
            branch_sets: (0..5).map(|i| vec![i, i + 5]).collect(),
        };
        assert!(verify_minor_model(&Graph::petersen(), &m));
    }

    #[test]
    fn defects_are_reported() {
        let g = Graph::complete(5);
        let overlap = MinorModel {
            branch_sets: vec![vec![0, 1], vec![1, 2]],
        };
        assert_eq!(check_minor_model(&g, &overlap), Err(ModelDefect::Overlap { vertex: 1 }));
        let p = Graph::path(4);
        let split = MinorModel {
            branch_sets: vec![vec![0, 2], vec![1]],
        };
        assert_eq!(check_minor_model(&p, &split), Err(ModelDefect::Disconnected(0)));
        let far = MinorModel {
            branch_sets: vec![vec![0], vec![3]],
        };
        assert_eq!(check_minor_model(&p, &far), Err(ModelDefect::NotAdjacent(0, 1)));
        let empty = MinorModel {
            branch_sets: vec![vec![]],
        };
        assert!(!verify_minor_model(&p, &empty));
    }

    #[test]
    fn degenerate_t() {
        let g = Graph::path(3);
        assert!(find_kt_minor(&g, 0, 10).is_err());
        assert!(find_kt_minor(&g, 1, 10).unwrap().is_some());
        assert_eq!(find_kt_minor(&g, 4, 10).unwrap(), None);
        assert_eq!(find_kt_minor(&Graph::empty(0), 1, 10).unwrap(), None);
    }

    #[test]
    fn budget_is_distinct_from_absence() {
        // K_7 minus a perfect-ish matching with a tiny budget
        let mut g = Graph::complete(12);
        for i in 0..6 {
            g.remove_edge(2 * i, 2 * i + 1);
        }
        let err = find_kt_minor_with(&BranchAndBound, &g, 9, 5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 5 }));
    }

    #[test]
    fn registry_lists_strategies() {
        let r = MinorRegistry::default();
        let names: Vec<_> = r.names().collect();
        assert_eq!(names, vec!["auto", "branch-and-bound", "low-deficiency"]);
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn wheels_summed_on_edge_stay_k5_free() {
        let w = Graph::wheel(5);
        assert_eq!(find_kt_minor(&w, 5, DEFAULT_BUDGET).unwrap(), None);
        let s = crate::graph::clique_sum(&w, &[0, 1], &w, &[0, 1], &[]).unwrap();
        assert_eq!(find_kt_minor(&s.graph, 5, DEFAULT_BUDGET).unwrap(), None);
        assert!(find_kt_minor(&s.graph, 4, DEFAULT_BUDGET).unwrap().is_some());
    }
}
