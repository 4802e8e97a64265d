#![allow(dead_code)]

use itertools::Itertools;
use rand::Rng;

use lchoose::graph::{Graph, Vertex};

/// Every vertex is deleted or joins one of `t` branch sets (labels introduced in order);
/// accepts when all sets are non-empty, connected and pairwise adjacent.
pub fn naive_has_kt_minor(g: &Graph, t: usize) -> bool {
    fn connected(g: &Graph, set: &[Vertex]) -> bool {
        let mut seen = vec![set[0]];
        let mut i = 0;
        while i < seen.len() {
            let u = seen[i];
            for &v in set {
                if !seen.contains(&v) && g.has_edge(u, v) {
                    seen.push(v);
                }
            }
            i += 1;
        }
        seen.len() == set.len()
    }
    fn accept(g: &Graph, label: &[usize], t: usize) -> bool {
        let sets: Vec<Vec<Vertex>> = (1..=t)
            .map(|b| (0..label.len()).filter(|&v| label[v] == b).collect())
            .collect();
        sets.iter().all(|s| !s.is_empty() && connected(g, s))
            && sets.iter().tuple_combinations().all(|(x, y)| {
                x.iter().any(|&u| y.iter().any(|&v| g.has_edge(u, v)))
            })
    }
    fn rec(g: &Graph, t: usize, label: &mut Vec<usize>, used: usize) -> bool {
        if label.len() == g.n() {
            return used == t && accept(g, label, t);
        }
        if t - used > g.n() - label.len() {
            return false;
        }
        for l in 0..=(used + 1).min(t) {
            label.push(l);
            let next = if l == used + 1 { used + 1 } else { used };
            if rec(g, t, label, next) {
                return true;
            }
            label.pop();
        }
        false
    }
    if t == 0 {
        return true;
    }
    rec(g, t, &mut Vec::new(), 0)
}

/// All labelled graphs on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
        .collect()
}

/// One representative per isomorphism class, by minimum edge mask over all relabellings.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n).tuple_combinations().collect();
    let index = |u: Vertex, v: Vertex| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let perms: Vec<Vec<Vertex>> = (0..n).permutations(n).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for g in all_graphs(n) {
        let canon = perms
            .iter()
            .map(|p| {
                g.edges()
                    .iter()
                    .map(|&(u, v)| 1u64 << index(p[u], p[v]))
                    .sum::<u64>()
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canon) {
            out.push(g);
        }
    }
    out
}

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = (0..n).tuple_combinations().filter(|_| rng.gen_bool(p)).collect();
    Graph::from_edges(n, &edges).unwrap()
}
