//! Two-clique graphs with few non-neighbours and no large clique minor: exact
//! verification, deterministic cyclic instances, and seeded sampling.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_clique, Graph, GraphJson, Vertex, DEFAULT_MAX_VERTICES};
use crate::minor::{find_kt_minor, MinorModel};
use crate::witness::CheckStatus;

pub type Rational = Ratio<u64>;

/// `"p/q"` text form for rationals in JSON.
pub mod ratio_text {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses `p/q` or an integer.
pub fn parse_ratio(s: &str) -> Result<Rational> {
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// `⌊r · n⌋`.
pub fn floor_times(r: Rational, n: usize) -> usize {
    ((*r.numer() as u128 * n as u128) / *r.denom() as u128) as usize
}

/// `⌈(1 + 2ε) n⌉`, the clique-minor order the instance must avoid.
pub fn steiner_t(n: usize, eps: Rational) -> usize {
    let num = (*eps.denom() as u128 + 2 * *eps.numer() as u128) * n as u128;
    num.div_ceil(*eps.denom() as u128) as usize
}

/// Serialized as graph JSON plus `A`, `B`, `eps` and `verified_t`; the clique order
/// `n` is `|A|` (the graph's own `n` key counts all `2n` vertices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SteinerJson", into = "SteinerJson")]
pub struct SteinerGraph {
    pub graph: Graph,
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    pub n: usize,
    pub eps: Rational,
    pub verified_t: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct SteinerJson {
    #[serde(flatten)]
    graph: GraphJson,
    #[serde(rename = "A")]
    a: Vec<Vertex>,
    #[serde(rename = "B")]
    b: Vec<Vertex>,
    #[serde(with = "ratio_text")]
    eps: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verified_t: Option<usize>,
}

impl From<SteinerGraph> for SteinerJson {
    fn from(h: SteinerGraph) -> Self {
        SteinerJson {
            graph: h.graph.to_json_value(),
            a: h.a,
            b: h.b,
            eps: h.eps,
            verified_t: h.verified_t,
        }
    }
}

impl TryFrom<SteinerJson> for SteinerGraph {
    type Error = Error;

    fn try_from(j: SteinerJson) -> Result<Self> {
        let graph = Graph::from_json_value(&j.graph, DEFAULT_MAX_VERTICES)?;
        if j.a.len() != j.b.len() || 2 * j.a.len() != graph.n() {
            return Err(Error::invalid("A and B must split the vertices into two halves"));
        }
        Ok(SteinerGraph {
            n: j.a.len(),
            graph,
            a: j.a,
            b: j.b,
            eps: j.eps,
            verified_t: j.verified_t,
        })
    }
}

/// Two `n`-cliques `A = 0..n`, `B = n..2n`; `B_i` misses `A_i, …, A_{i+d−1}` (mod n).
pub fn cyclic_steiner(n: usize, d: usize, eps: Rational) -> Result<SteinerGraph> {
    if d > n {
        return Err(Error::invalid(format!("cannot miss {d} of {n} vertices")));
    }
    let mut g = Graph::empty(2 * n);
    for u in 0..2 * n {
        for v in u + 1..2 * n {
            let cross_missing = u < n && v >= n && (u + n - (v - n)) % n < d;
            if !cross_missing {
                g.add_edge(u, v);
            }
        }
    }
    for i in 0..n {
        g.set_label(i, format!("A{i}"));
        g.set_label(n + i, format!("B{i}"));
    }
    Ok(SteinerGraph {
        graph: g,
        a: (0..n).collect(),
        b: (n..2 * n).collect(),
        n,
        eps,
        verified_t: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SteinerReport {
    pub cliques: CheckStatus,
    pub non_neighbors: CheckStatus,
    /// `⌊εn⌋`.
    pub bound: usize,
    pub max_non_neighbors: usize,
    /// Vertices with more than `bound` non-neighbours.
    pub offenders: Vec<Vertex>,
    pub t: usize,
    pub minor: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minor_model: Option<MinorModel>,
}

impl SteinerReport {
    pub fn all_pass(&self) -> bool {
        [self.cliques, self.non_neighbors, self.minor]
            .iter()
            .all(|&s| s == CheckStatus::Pass)
    }
}

/// Checks that `a` and `b` are `n`-cliques partitioning `h`, that every vertex has
/// at most `⌊εn⌋` non-neighbours, and that there is no `K_t` minor for
/// `t = ⌈(1+2ε)n⌉`.
pub fn verify_steiner(
    h: &Graph,
    a: &[Vertex],
    b: &[Vertex],
    n: usize,
    eps: Rational,
    budget: u64,
) -> Result<SteinerReport> {
    if a.len() != n || b.len() != n || h.n() != 2 * n {
        return Err(Error::invalid(format!(
            "need |A| = |B| = {n} partitioning {} vertices, got {} and {}",
            h.n(),
            a.len(),
            b.len()
        )));
    }
    let mut seen = vec![false; h.n()];
    for &v in a.iter().chain(b) {
        if v >= h.n() || std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid(format!("vertex {v} repeated or out of range in A/B")));
        }
    }
    let cliques = if is_clique(h, a)? && is_clique(h, b)? {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    let bound = floor_times(eps, n);
    let missing: Vec<usize> = (0..h.n()).map(|v| h.n() - 1 - h.degree(v)).collect();
    let offenders: Vec<Vertex> = (0..h.n()).filter(|&v| missing[v] > bound).collect();
    let t = steiner_t(n, eps);
    let (minor, minor_model) = match find_kt_minor(h, t, budget) {
        Ok(None) => (CheckStatus::Pass, None),
        Ok(Some(m)) => (CheckStatus::Fail, Some(m)),
        Err(e) if e.is_inconclusive() => (CheckStatus::Inconclusive, None),
        Err(e) => return Err(e),
    };
    Ok(SteinerReport {
        cliques,
        non_neighbors: if offenders.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound,
        max_non_neighbors: missing.iter().copied().max().unwrap_or(0),
        offenders,
        t,
        minor,
        minor_model,
    })
}

fn sample_once(n: usize, eps: Rational, seed: u64, attempt: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    let mut g = Graph::empty(2 * n);
    for u in 0..2 * n {
        for v in u + 1..2 * n {
            let cross = u < n && v >= n;
            let numer = *eps.numer().min(eps.denom());
            let absent = cross && numer > 0 && rng.gen_ratio(numer as u32, 2 * *eps.denom() as u32);
            if !absent {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Samples instances (cross edges absent independently with probability ε/2) and
/// returns the verified instance with the smallest attempt index, if any.
pub fn sample_steiner(
    n: usize,
    eps: Rational,
    seed: u64,
    attempts: u64,
    minor_budget: u64,
) -> Result<Option<(SteinerGraph, u64)>> {
    if *eps.denom() > u32::MAX as u64 / 2 {
        return Err(Error::invalid("eps denominator too large"));
    }
    let a: Vec<Vertex> = (0..n).collect();
    let b: Vec<Vertex> = (n..2 * n).collect();
    let found = (0..attempts)
        .into_par_iter()
        .map(|attempt| -> Result<Option<(Graph, u64)>> {
            let g = sample_once(n, eps, seed, attempt);
            let bound = floor_times(eps, n);
            if (0..g.n()).any(|v| g.n() - 1 - g.degree(v) > bound) {
                return Ok(None);
            }
            let r = verify_steiner(&g, &a, &b, n, eps, minor_budget)?;
            Ok(r.all_pass().then_some((g, attempt)))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(None),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((g, attempt)))) => Ok(Some((
            SteinerGraph {
                graph: g,
                a,
                b,
                n,
                eps,
                verified_t: Some(steiner_t(n, eps)),
            },
            attempt,
        ))),
    }
}
