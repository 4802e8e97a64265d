use fixedbitset::FixedBitSet;
use itertools::Itertools;

use super::{trivial_cases, Budget, MinorModel, MinorStrategy};
use crate::error::Result;
use crate::graph::{Graph, Vertex};

/// Search for the regime where `d = n - t` is small.
///
/// In a K_t model let `R` be the vertices that are deleted or lie in a branch set of
/// size at least two. The remaining singletons form a clique, so `R` covers every
/// non-edge, and counting gives `d <= |R| <= 2d`. The search enumerates each such
/// cover exactly once (branching on the first uncovered non-edge, then adding free
/// vertices), and for each cover tries every split of `R` into `|R| - d` connected
/// blocks of size at least two plus deleted vertices.
pub struct LowDeficiency {
    pub max_deficiency: usize,
}

impl Default for LowDeficiency {
    fn default() -> Self {
        LowDeficiency { max_deficiency: 6 }
    }
}

struct Search<'g> {
    g: &'g Graph,
    t: usize,
    d: usize,
    all: FixedBitSet,
}

impl Search<'_> {
    fn first_uncovered_nonedge(&self, outside: &FixedBitSet) -> Option<(Vertex, Vertex)> {
        for u in outside.ones() {
            let mut miss = outside.clone();
            miss.difference_with(self.g.neighbors(u));
            miss.set(u, false);
            if let Some(v) = miss.ones().find(|&v| v > u) {
                return Some((u, v));
            }
        }
        None
    }

    /// `forced` must lie in R, `excluded` must stay a singleton.
    fn covers(
        &self,
        forced: &mut FixedBitSet,
        excluded: &mut FixedBitSet,
        budget: &mut Budget,
    ) -> Result<Option<MinorModel>> {
        budget.tick()?;
        if forced.count_ones(..) > 2 * self.d {
            return Ok(None);
        }
        let mut outside = self.all.clone();
        outside.difference_with(forced);
        match self.first_uncovered_nonedge(&outside) {
            None => self.extend(forced, excluded, budget),
            Some((u, v)) => {
                if !excluded.contains(u) {
                    forced.insert(u);
                    let r = self.covers(forced, excluded, budget)?;
                    forced.set(u, false);
                    if r.is_some() {
                        return Ok(r);
                    }
                }
                if excluded.contains(v) {
                    return Ok(None);
                }
                let u_was_excluded = excluded.contains(u);
                excluded.insert(u);
                forced.insert(v);
                let r = self.covers(forced, excluded, budget)?;
                forced.set(v, false);
                excluded.set(u, u_was_excluded);
                Ok(r)
            }
        }
    }

    fn extend(
        &self,
        forced: &FixedBitSet,
        excluded: &FixedBitSet,
        budget: &mut Budget,
    ) -> Result<Option<MinorModel>> {
        let base = forced.count_ones(..);
        let mut free = self.all.clone();
        free.difference_with(forced);
        free.difference_with(excluded);
        let free: Vec<Vertex> = free.ones().collect();
        let lo = self.d.saturating_sub(base);
        let hi = (2 * self.d - base).min(free.len());
        for extra in lo..=hi {
            for chosen in free.iter().copied().combinations(extra) {
                budget.tick()?;
                let mut r: Vec<Vertex> = forced.ones().chain(chosen).collect();
                r.sort_unstable();
                if let Some(m) = self.split(&r, budget)? {
                    return Ok(Some(m));
                }
            }
        }
        Ok(None)
    }

    fn split(&self, r: &[Vertex], budget: &mut Budget) -> Result<Option<MinorModel>> {
        let blocks_needed = r.len() - self.d;
        let mut q = self.all.clone();
        for &v in r {
            q.set(v, false);
        }
        debug_assert_eq!(q.count_ones(..) + blocks_needed, self.t);
        let singletons: Vec<Vec<Vertex>> = q.ones().map(|v| vec![v]).collect();
        if blocks_needed == 0 {
            return Ok(Some(MinorModel { branch_sets: singletons }.canonical()));
        }
        if 2 * blocks_needed > r.len() {
            return Ok(None);
        }
        // label per vertex of r: None = deleted, Some(b) = block b (restricted growth)
        let mut labels: Vec<Option<usize>> = vec![None; r.len()];
        let mut sizes: Vec<usize> = Vec::new();
        let found = self.assign(r, 0, &mut labels, &mut sizes, blocks_needed, &q, budget)?;
        Ok(found.map(|blocks| {
            let mut sets = singletons;
            sets.extend(blocks);
            MinorModel { branch_sets: sets }.canonical()
        }))
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        r: &[Vertex],
        i: usize,
        labels: &mut Vec<Option<usize>>,
        sizes: &mut Vec<usize>,
        need: usize,
        q: &FixedBitSet,
        budget: &mut Budget,
    ) -> Result<Option<Vec<Vec<Vertex>>>> {
        let remaining = r.len() - i;
        let deficit: usize = sizes.iter().map(|&s| 2usize.saturating_sub(s)).sum::<usize>()
            + 2 * (need - sizes.len());
        if deficit > remaining {
            return Ok(None);
        }
        if i == r.len() {
            budget.tick()?;
            return Ok(self.check_blocks(r, labels, need, q));
        }
        for b in 0..sizes.len() {
            labels[i] = Some(b);
            sizes[b] += 1;
            let res = self.assign(r, i + 1, labels, sizes, need, q, budget)?;
            sizes[b] -= 1;
            if res.is_some() {
                return Ok(res);
            }
        }
        if sizes.len() < need {
            labels[i] = Some(sizes.len());
            sizes.push(1);
            let res = self.assign(r, i + 1, labels, sizes, need, q, budget)?;
            sizes.pop();
            if res.is_some() {
                return Ok(res);
            }
        }
        labels[i] = None;
        let res = self.assign(r, i + 1, labels, sizes, need, q, budget)?;
        Ok(res)
    }

    fn check_blocks(
        &self,
        r: &[Vertex],
        labels: &[Option<usize>],
        need: usize,
        q: &FixedBitSet,
    ) -> Option<Vec<Vec<Vertex>>> {
        let n = self.g.n();
        let mut sets = vec![FixedBitSet::with_capacity(n); need];
        for (&v, l) in r.iter().zip(labels) {
            if let Some(b) = l {
                sets[*b].insert(v);
            }
        }
        let mut reach = Vec::with_capacity(need);
        for s in &sets {
            let mut nb = FixedBitSet::with_capacity(n);
            for v in s.ones() {
                nb.union_with(self.g.neighbors(v));
            }
            if !q.is_subset(&nb) || !self.g.is_connected_set(s) {
                return None;
            }
            reach.push(nb);
        }
        for i in 0..need {
            for j in i + 1..need {
                if reach[i].is_disjoint(&sets[j]) {
                    return None;
                }
            }
        }
        Some(sets.iter().map(|s| s.ones().collect()).collect())
    }
}

impl MinorStrategy for LowDeficiency {
    fn name(&self) -> &'static str {
        "low-deficiency"
    }

    fn suited(&self, g: &Graph, t: usize) -> bool {
        t <= g.n() && g.n() - t <= self.max_deficiency
    }

    fn search(&self, g: &Graph, t: usize, budget: &mut Budget) -> Result<Option<MinorModel>> {
        if let Some(trivial) = trivial_cases(g, t) {
            return Ok(trivial);
        }
        let n = g.n();
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        let s = Search {
            g,
            t,
            d: n - t,
            all,
        };
        let mut forced = FixedBitSet::with_capacity(n);
        let mut excluded = FixedBitSet::with_capacity(n);
        s.covers(&mut forced, &mut excluded, budget)
    }
}
