//! Desk-scale λ-choosability by canonical enumeration of (λ, C)-assignments.
//!
//! Parts equal to 1 get a single shared colour each. Every other class `i` draws
//! from a universe of at most `caps[i]` colours (default `k_i · n`, enough for each
//! vertex to bring `k_i` new colours), and lists are enumerated up to renaming
//! colours inside a class: a vertex may only use a new colour of a class once all
//! lower-numbered colours of that class are in use. Lists are trimmed to exactly
//! `k_i` colours per class, since larger lists only make colouring easier.
//!
//! Vertices of degree below `k_λ` are peeled off first; they can always be coloured
//! last, so only the remaining core is enumerated.

use serde::Serialize;

use crate::coloring::find_coloring;
use crate::error::Result;
use crate::graph::{Graph, Vertex};
use crate::lambda::Lambda;
use crate::lists::{Color, ColorSet, ColourClasses, ListAssignment};

/// Default limit on the number of full assignments checked.
pub const DEFAULT_ASSIGNMENT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ChoosabilityVerdict {
    /// Every canonical assignment within the caps is colourable.
    Choosable { checked: u64 },
    /// The first canonical assignment without an L-colouring.
    Witness {
        classes: ColourClasses,
        lists: ListAssignment,
        checked: u64,
    },
    /// The enumeration would exceed the assignment budget.
    CapExceeded { checked: u64 },
}

impl ChoosabilityVerdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, ChoosabilityVerdict::Witness { .. })
    }
}

/// Vertices left after repeatedly deleting vertices of degree `< k`, ascending.
pub fn core_vertices(g: &Graph, k: usize) -> Vec<Vertex> {
    let mut alive = vec![true; g.n()];
    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut stack: Vec<Vertex> = (0..g.n()).filter(|&v| deg[v] < k).collect();
    for &v in &stack {
        alive[v] = false;
    }
    while let Some(v) = stack.pop() {
        for u in g.neighbors(v).ones() {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] < k {
                    alive[u] = false;
                    stack.push(u);
                }
            }
        }
    }
    (0..g.n()).filter(|&v| alive[v]).collect()
}

struct ClassPlan {
    need: usize,
    colors: Vec<Color>,
}

struct Enumerator<'a> {
    core: &'a Graph,
    plans: Vec<ClassPlan>,
    budget: u64,
    checked: u64,
    // chosen[v][i] = colours of class i on core vertex v
    chosen: Vec<Vec<Vec<Color>>>,
    used: Vec<usize>,
}

enum Step {
    Continue,
    Found(ListAssignment),
    OutOfBudget,
}

impl Enumerator<'_> {
    fn lists(&self) -> ListAssignment {
        ListAssignment::new(
            self.chosen
                .iter()
                .map(|per_class| per_class.iter().flatten().copied().collect())
                .collect(),
        )
    }

    fn vertex(&mut self, v: usize) -> Result<Step> {
        if v == self.core.n() {
            self.checked += 1;
            if self.checked > self.budget {
                return Ok(Step::OutOfBudget);
            }
            let lists = self.lists();
            return Ok(match find_coloring(self.core, &lists, None)? {
                Some(_) => Step::Continue,
                None => Step::Found(lists),
            });
        }
        self.class(v, 0)
    }

    fn class(&mut self, v: usize, i: usize) -> Result<Step> {
        if i == self.plans.len() {
            return self.vertex(v + 1);
        }
        let need = self.plans[i].need;
        let used = self.used[i];
        let cap = self.plans[i].colors.len();
        for fresh in 0..=need.min(cap - used) {
            let from_used = need - fresh;
            if from_used > used {
                continue;
            }
            let fresh_colors: Vec<Color> = self.plans[i].colors[used..used + fresh].to_vec();
            for combo in itertools::Itertools::combinations(0..used, from_used) {
                let mut pick: Vec<Color> = combo.iter().map(|&j| self.plans[i].colors[j]).collect();
                pick.extend(&fresh_colors);
                self.chosen[v][i] = pick;
                self.used[i] = used + fresh;
                let step = self.class(v, i + 1)?;
                self.used[i] = used;
                if !matches!(step, Step::Continue) {
                    return Ok(step);
                }
            }
        }
        Ok(Step::Continue)
    }
}

/// Searches for a (λ, C)-assignment of `g` with no L-colouring.
///
/// `caps[i]` bounds the universe of the class aligned with `lam.parts()[i]`
/// (non-increasing order); `None` uses `k_i · n`. Singleton parts ignore their cap.
pub fn lambda_choosable_small(
    g: &Graph,
    lam: &Lambda,
    caps: Option<&[usize]>,
    budget: u64,
) -> Result<ChoosabilityVerdict> {
    if let Some(c) = caps {
        if c.len() != lam.len() {
            return Err(crate::Error::invalid(format!(
                "{} caps for {} parts",
                c.len(),
                lam.len()
            )));
        }
    }
    let k = lam.k() as usize;
    let core_ids = core_vertices(g, k);
    let core = g.induced(&core_ids);

    let mut next: Color = 0;
    let mut plans = Vec::with_capacity(lam.len());
    for (i, &part) in lam.parts().iter().enumerate() {
        let need = part as usize;
        let size = if need == 1 {
            1
        } else {
            let cap = caps.map_or(need * core.n().max(1), |c| c[i]);
            if cap < need {
                return Err(crate::Error::invalid(format!(
                    "cap {cap} for class {i} is below its part {need}"
                )));
            }
            cap
        };
        let colors: Vec<Color> = (next..next + size as Color).collect();
        next += size as Color;
        plans.push(ClassPlan { need, colors });
    }
    let classes = ColourClasses::new(
        plans
            .iter()
            .map(|p| p.colors.iter().copied().collect())
            .collect(),
    );
    let baseline: ColorSet = plans
        .iter()
        .flat_map(|p| p.colors[..p.need].iter().copied())
        .collect();

    let mut e = Enumerator {
        core: &core,
        plans,
        budget,
        checked: 0,
        chosen: vec![vec![Vec::new(); lam.len()]; core.n()],
        used: vec![0; lam.len()],
    };
    let step = e.vertex(0)?;
    Ok(match step {
        Step::Continue => ChoosabilityVerdict::Choosable { checked: e.checked },
        Step::OutOfBudget => ChoosabilityVerdict::CapExceeded { checked: e.checked - 1 },
        Step::Found(core_lists) => {
            let mut lists = ListAssignment::uniform(g.n(), &baseline);
            for (i, &v) in core_ids.iter().enumerate() {
                lists.lists[v] = core_lists.lists[i].clone();
            }
            ChoosabilityVerdict::Witness {
                classes,
                lists,
                checked: e.checked,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;
    use crate::lists::is_valid_assignment;

    fn run(g: &Graph, lam: &str) -> ChoosabilityVerdict {
        lambda_choosable_small(g, &parse_lambda(lam).unwrap(), None, DEFAULT_ASSIGNMENT_BUDGET).unwrap()
    }

    #[test]
    fn k4_is_four_colourable() {
        assert!(matches!(run(&Graph::complete(4), "1*4"), ChoosabilityVerdict::Choosable { .. }));
    }

    #[test]
    fn k4_is_not_three_choosable() {
        let g = Graph::complete(4);
        let lam = parse_lambda("3").unwrap();
        match run(&g, "3") {
            ChoosabilityVerdict::Witness { classes, lists, .. } => {
                assert_eq!(is_valid_assignment(&g, &lists, &lam, &classes).unwrap(), Ok(()));
                assert_eq!(find_coloring(&g, &lists, None).unwrap(), None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn even_cycle_is_two_choosable() {
        assert!(matches!(run(&Graph::cycle(4), "2"), ChoosabilityVerdict::Choosable { .. }));
    }

    #[test]
    fn k23_is_two_choosable_but_k24_is_not() {
        // K_{2,3} is the theta graph with three paths of length 2
        let k = |s: usize| {
            let edges: Vec<_> = (2..2 + s).flat_map(|v| [(0, v), (1, v)]).collect();
            Graph::from_edges(2 + s, &edges).unwrap()
        };
        assert!(matches!(run(&k(3), "2"), ChoosabilityVerdict::Choosable { .. }));
        assert!(matches!(run(&k(4), "2"), ChoosabilityVerdict::Witness { .. }));
    }

    #[test]
    fn witness_covers_peeled_vertices() {
        // K_4 plus a pendant vertex: the pendant is peeled, the witness still covers it
        let mut edges: Vec<_> = Graph::complete(4).edges();
        edges.push((3, 4));
        let g = Graph::from_edges(5, &edges).unwrap();
        let lam = parse_lambda("1,2").unwrap();
        match run(&g, "1,2") {
            ChoosabilityVerdict::Witness { classes, lists, .. } => {
                assert_eq!(lists.len(), 5);
                assert_eq!(is_valid_assignment(&g, &lists, &lam, &classes).unwrap(), Ok(()));
                assert_eq!(find_coloring(&g, &lists, None).unwrap(), None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tiny_budget_reports_cap_exceeded() {
        let v = lambda_choosable_small(&Graph::cycle(4), &parse_lambda("2").unwrap(), None, 3).unwrap();
        assert_eq!(v, ChoosabilityVerdict::CapExceeded { checked: 3 });
    }

    #[test]
    fn core_peels_trees_entirely() {
        assert!(core_vertices(&Graph::path(6), 2).is_empty());
        assert_eq!(core_vertices(&Graph::cycle(5), 2).len(), 5);
    }
}
