use fixedbitset::FixedBitSet;

use super::{trivial_cases, Budget, MinorModel, MinorStrategy};
use crate::error::Result;
use crate::graph::{Graph, Vertex};

/// Assigns vertices in ascending order to an existing branch set, a new one, or the
/// deleted pool. A set with no unassigned neighbour is final and must already be
/// connected and adjacent to every other set.
pub struct BranchAndBound;

struct State<'g> {
    g: &'g Graph,
    t: usize,
    sets: Vec<FixedBitSet>,
    reach: Vec<FixedBitSet>,
    later: Vec<FixedBitSet>,
}

impl State<'_> {
    fn consistent(&self, v: Vertex) -> bool {
        let c = self.sets.len();
        let n = self.g.n();
        if c + (n - v - 1) < self.t {
            return false;
        }
        for i in 0..c {
            if !self.reach[i].is_disjoint(&self.later[v]) {
                continue;
            }
            if c < self.t || !self.g.is_connected_set(&self.sets[i]) {
                return false;
            }
            if (0..c).any(|j| j != i && self.reach[i].is_disjoint(&self.sets[j])) {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, v: Vertex, budget: &mut Budget) -> Result<bool> {
        budget.tick()?;
        let n = self.g.n();
        if v == n {
            return Ok(self.sets.len() == self.t);
        }
        for i in 0..self.sets.len() {
            let saved = self.reach[i].clone();
            self.sets[i].insert(v);
            self.reach[i].union_with(self.g.neighbors(v));
            if self.consistent(v) && self.dfs(v + 1, budget)? {
                return Ok(true);
            }
            self.sets[i].set(v, false);
            self.reach[i] = saved;
        }
        if self.sets.len() < self.t {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(v);
            self.sets.push(s);
            self.reach.push(self.g.neighbors(v).clone());
            if self.consistent(v) && self.dfs(v + 1, budget)? {
                return Ok(true);
            }
            self.sets.pop();
            self.reach.pop();
        }
        if self.consistent(v) && self.dfs(v + 1, budget)? {
            return Ok(true);
        }
        Ok(false)
    }
}

impl MinorStrategy for BranchAndBound {
    fn name(&self) -> &'static str {
        "branch-and-bound"
    }

    fn suited(&self, g: &Graph, _t: usize) -> bool {
        g.n() <= 16
    }

    fn search(&self, g: &Graph, t: usize, budget: &mut Budget) -> Result<Option<MinorModel>> {
        if let Some(trivial) = trivial_cases(g, t) {
            return Ok(trivial);
        }
        let n = g.n();
        let later = (0..n)
            .map(|v| {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert_range(v + 1..n);
                s
            })
            .collect();
        let mut st = State {
            g,
            t,
            sets: Vec::new(),
            reach: Vec::new(),
            later,
        };
        if st.dfs(0, budget)? {
            let m = MinorModel {
                branch_sets: st.sets.iter().map(|s| s.ones().collect()).collect(),
            };
            Ok(Some(m.canonical()))
        } else {
            Ok(None)
        }
    }
}
