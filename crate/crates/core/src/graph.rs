//! Undirected simple graphs over dense vertex ids, clique tests and clique-sums.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Vertex-count limit applied when graphs are read from external files.
pub const DEFAULT_MAX_VERTICES: usize = 1024;

/// Undirected simple graph on vertices `0..n`, adjacency stored as one bitset per vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
    labels: BTreeMap<Vertex, String>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n(), self.edge_count())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            labels: BTreeMap::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Hub 0 joined to a rim cycle on `1..=rim`.
    pub fn wheel(rim: usize) -> Self {
        let mut edges: Vec<_> = (1..=rim).map(|v| (0, v)).collect();
        for i in 0..rim {
            edges.push((1 + i, 1 + (i + 1) % rim));
        }
        Graph::from_edges(rim + 1, &edges).expect("wheel edges are valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges).expect("petersen edges are valid")
    }

    /// Builds a graph from an edge list; self-loops and out-of-range ids are rejected,
    /// repeated edges are merged.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && v < self.n() && self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            out.extend(self.adj[u].ones().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn set_label(&mut self, v: Vertex, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn labels(&self) -> &BTreeMap<Vertex, String> {
        &self.labels
    }

    pub fn vertex_set(&self, vs: impl IntoIterator<Item = Vertex>) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        for v in vs {
            s.insert(v);
        }
        s
    }

    /// Subgraph induced on `vs`; vertex `vs[i]` becomes `i`.
    pub fn induced(&self, vs: &[Vertex]) -> Graph {
        let mut g = Graph::empty(vs.len());
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
            if let Some(l) = self.label(u) {
                g.set_label(i, l);
            }
        }
        g
    }

    /// Graph obtained by deleting the vertices in `removed`; returns it with the list
    /// of surviving original ids.
    pub fn without(&self, removed: &BTreeSet<Vertex>) -> (Graph, Vec<Vertex>) {
        let keep: Vec<Vertex> = (0..self.n()).filter(|v| !removed.contains(v)).collect();
        (self.induced(&keep), keep)
    }

    /// True iff `s` (a set of vertices within `mask`) induces a connected subgraph.
    pub fn is_connected_set(&self, s: &FixedBitSet) -> bool {
        let Some(start) = s.ones().next() else {
            return false;
        };
        let mut seen = FixedBitSet::with_capacity(self.n());
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for w in self.adj[u].intersection(s) {
                if !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen.count_ones(..) == s.count_ones(..)
    }

    /// Connected components of the subgraph induced on `within`, each sorted, ordered
    /// by smallest vertex.
    pub fn components_within(&self, within: &FixedBitSet) -> Vec<Vec<Vertex>> {
        let mut seen = FixedBitSet::with_capacity(self.n());
        let mut comps = Vec::new();
        for start in within.ones() {
            if seen.contains(start) {
                continue;
            }
            seen.insert(start);
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for w in self.adj[u].intersection(within) {
                    if !seen.contains(w) {
                        seen.insert(w);
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            n: self.n(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            labels: (!self.labels.is_empty()).then(|| {
                self.labels
                    .iter()
                    .map(|(v, l)| (v.to_string(), l.clone()))
                    .collect()
            }),
        }
    }

    pub fn from_json_value(j: &GraphJson, max_vertices: usize) -> Result<Graph> {
        if j.n > max_vertices {
            return Err(Error::invalid(format!(
                "graph has {} vertices, limit is {max_vertices}",
                j.n
            )));
        }
        let mut g = Graph::empty(j.n);
        for &[u, v] in &j.edges {
            if u >= j.n || v >= j.n {
                return Err(Error::invalid(format!("edge [{u},{v}] out of range for n={}", j.n)));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::invalid(format!("duplicate edge [{u},{v}]")));
            }
            g.add_edge(u, v);
        }
        if let Some(labels) = &j.labels {
            for (k, l) in labels {
                let v: Vertex = k
                    .parse()
                    .map_err(|_| Error::invalid(format!("label key {k:?} is not a vertex id")))?;
                if v >= j.n {
                    return Err(Error::invalid(format!("label for vertex {v} out of range")));
                }
                g.set_label(v, l.clone());
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let j: GraphJson = serde_json::from_str(text)?;
        Graph::from_json_value(&j, DEFAULT_MAX_VERTICES)
    }

    /// DIMACS `.col` text: `p edge n m` then `e u v` with 1-based ids.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p edge {} {}", self.n(), self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Graph> {
        let mut g: Option<Graph> = None;
        let mut declared_m = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                None | Some("c") => continue,
                Some("p") => {
                    let fmt = it.next();
                    let n = it.next().and_then(|x| x.parse::<usize>().ok());
                    let m = it.next().and_then(|x| x.parse::<usize>().ok());
                    match (fmt, n, m) {
                        (Some("edge" | "col"), Some(n), Some(m)) => {
                            if n > DEFAULT_MAX_VERTICES {
                                return Err(Error::invalid(format!("{n} vertices exceeds limit")));
                            }
                            g = Some(Graph::empty(n));
                            declared_m = m;
                        }
                        _ => {
                            return Err(Error::Parse {
                                pos: lineno + 1,
                                msg: "malformed problem line".into(),
                            })
                        }
                    }
                }
                Some("e") => {
                    let g = g.as_mut().ok_or(Error::Parse {
                        pos: lineno + 1,
                        msg: "edge before problem line".into(),
                    })?;
                    let u = it.next().and_then(|x| x.parse::<usize>().ok());
                    let v = it.next().and_then(|x| x.parse::<usize>().ok());
                    match (u, v) {
                        (Some(u), Some(v)) if u >= 1 && v >= 1 && u <= g.n() && v <= g.n() && u != v => {
                            g.add_edge(u - 1, v - 1)
                        }
                        _ => {
                            return Err(Error::Parse {
                                pos: lineno + 1,
                                msg: "bad edge line".into(),
                            })
                        }
                    }
                }
                Some(_) => {
                    return Err(Error::Parse {
                        pos: lineno + 1,
                        msg: "unknown line type".into(),
                    })
                }
            }
        }
        let g = g.ok_or(Error::Parse {
            pos: 0,
            msg: "missing problem line".into(),
        })?;
        if g.edge_count() != declared_m {
            return Err(Error::invalid(format!(
                "problem line declares {declared_m} edges, found {}",
                g.edge_count()
            )));
        }
        Ok(g)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::from_json_value(&j, DEFAULT_MAX_VERTICES).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, String>>,
}

pub fn is_clique(g: &Graph, s: &[Vertex]) -> Result<bool> {
    if let Some(&v) = s.iter().find(|&&v| v >= g.n()) {
        return Err(Error::invalid(format!("vertex {v} out of range for n={}", g.n())));
    }
    Ok(s.iter()
        .enumerate()
        .all(|(i, &u)| s[i + 1..].iter().all(|&v| u != v && g.has_edge(u, v))))
}

/// Result of gluing two graphs along a shared clique.
#[derive(Clone, Debug)]
pub struct CliqueSum {
    pub graph: Graph,
    /// `map1[v]` is the id of `g1`'s vertex `v` in the sum (identity).
    pub map1: Vec<Vertex>,
    /// `map2[v]` is the id of `g2`'s vertex `v` in the sum.
    pub map2: Vec<Vertex>,
}

/// Clique-sum of `g1` and `g2`: `s1[i]` is identified with `s2[i]`, then the shared
/// clique edges listed in `drop` (given as `g1` vertex pairs) are deleted.
///
/// `g1` keeps its ids; the private vertices of `g2` follow in ascending order.
pub fn clique_sum(
    g1: &Graph,
    s1: &[Vertex],
    g2: &Graph,
    s2: &[Vertex],
    drop: &[(Vertex, Vertex)],
) -> Result<CliqueSum> {
    if s1.len() != s2.len() {
        return Err(Error::invalid(format!(
            "clique sizes differ: {} vs {}",
            s1.len(),
            s2.len()
        )));
    }
    if !is_clique(g1, s1)? {
        return Err(Error::invalid("s1 is not a clique of g1"));
    }
    if !is_clique(g2, s2)? {
        return Err(Error::invalid("s2 is not a clique of g2"));
    }
    for &(u, v) in drop {
        if u == v || !s1.contains(&u) || !s1.contains(&v) {
            return Err(Error::invalid(format!(
                "dropped edge ({u},{v}) is not an edge of the shared clique"
            )));
        }
    }
    let mut graph = g1.clone();
    let map2 = glue_copy(&mut graph, s1, g2, s2);
    for &(u, v) in drop {
        graph.remove_edge(u, v);
    }
    Ok(CliqueSum {
        graph,
        map1: (0..g1.n()).collect(),
        map2,
    })
}

/// Appends a copy of `h` to `g`, identifying `h`'s vertex `hk[i]` with `g`'s `gk[i]`.
/// Returns the id map for `h`. Cliqueness is the caller's responsibility.
pub(crate) fn glue_copy(g: &mut Graph, gk: &[Vertex], h: &Graph, hk: &[Vertex]) -> Vec<Vertex> {
    let old_n = g.n();
    let mut map = vec![usize::MAX; h.n()];
    for (&a, &b) in gk.iter().zip(hk) {
        map[b] = a;
    }
    let mut next = old_n;
    for slot in map.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let new_n = next;
    for a in g.adj.iter_mut() {
        a.grow(new_n);
    }
    g.adj.extend((old_n..new_n).map(|_| FixedBitSet::with_capacity(new_n)));
    for (u, v) in h.edges() {
        let (mu, mv) = (map[u], map[v]);
        if !g.has_edge(mu, mv) {
            g.add_edge(mu, mv);
        }
    }
    for (&v, l) in h.labels() {
        if map[v] >= old_n {
            g.set_label(map[v], l.clone());
        }
    }
    map
}
