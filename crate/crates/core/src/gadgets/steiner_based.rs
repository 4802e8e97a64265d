//! Constructions that glue one copy of a two-clique graph `H` per injection of its
//! clique `A` into a colour pool, sharing `A` across copies.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cert, clique_extension, falling, section_json, CertificateReport, GadgetCheck, DEFAULT_GADGET_COPY_CAP};
use crate::coloring::{find_bfold, FoldColoring};
use crate::error::{Error, Result};
use crate::graph::{is_clique, Graph, Vertex, DEFAULT_MAX_VERTICES};
use crate::lambda::Lambda;
use crate::lists::{Color, ColorSet, ColourClasses, ListAssignment};
use crate::minor::DEFAULT_BUDGET;
use crate::sdr::SdrOutcome;
use crate::steiner::{cyclic_steiner, floor_times, ratio_text, steiner_t, verify_steiner, Rational, SteinerGraph};
use crate::witness::{CheckStatus, CompositionRecord, CopyRecord, Witness};

/// `ε' = ε / (2(q+4))`.
pub fn epsilon_prime(eps: Rational, q: usize) -> Rational {
    eps / Rational::from_integer(2 * (q as u64 + 4))
}

/// `(2 − qε') / (1 + 2ε') ≥ 2 − ε/2`, exactly.
pub fn check_epsilon_prime(eps: Rational, q: usize, eps_prime: Rational) -> bool {
    let wide = |r: Rational| Ratio::<i128>::new(*r.numer() as i128, *r.denom() as i128);
    let (e, ep) = (wide(eps), wide(eps_prime));
    let two = Ratio::from_integer(2);
    let lhs = (two - Ratio::from_integer(q as i128) * ep) / (Ratio::from_integer(1) + two * ep);
    lhs >= two - e / two
}

/// The cyclic instance missing `⌊εn⌋` cross edges per vertex, verified exactly.
pub fn default_steiner(n: usize, eps: Rational) -> Result<SteinerGraph> {
    let mut h = cyclic_steiner(n, floor_times(eps, n), eps)?;
    let rep = verify_steiner(&h.graph, &h.a, &h.b, n, eps, DEFAULT_BUDGET)?;
    if !rep.all_pass() {
        return Err(Error::Precondition(format!(
            "cyclic instance n = {n}, eps = {eps} fails verification (minor {:?})",
            rep.minor
        )));
    }
    h.verified_t = Some(rep.t);
    Ok(h)
}

/// Shared layout: `A` becomes `0..n`, copy `i` owns `n + i·n .. n + (i+1)·n`.
struct Layout {
    n: usize,
    /// For each `H` vertex, its index in `A` or in `B`.
    side: Vec<(bool, usize)>,
    /// Non-neighbours in `A` (as indices) of each `B` index.
    missing: Vec<Vec<usize>>,
}

impl Layout {
    fn new(h: &SteinerGraph) -> Result<Self> {
        let n = h.n;
        if h.a.len() != n || h.b.len() != n || h.graph.n() != 2 * n {
            return Err(Error::invalid("Steiner graph needs |A| = |B| = n partitioning 2n vertices"));
        }
        if !is_clique(&h.graph, &h.a)? || !is_clique(&h.graph, &h.b)? {
            return Err(Error::invalid("A and B must be cliques in H"));
        }
        let mut side = vec![None; 2 * n];
        for (i, &v) in h.a.iter().enumerate() {
            side[v] = Some((true, i));
        }
        for (j, &v) in h.b.iter().enumerate() {
            if side[v].replace((false, j)).is_some() {
                return Err(Error::invalid(format!("vertex {v} is in both A and B")));
            }
        }
        let side: Vec<(bool, usize)> = side
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| Error::invalid("A and B do not cover H"))?;
        let missing = h
            .b
            .iter()
            .map(|&y| (0..n).filter(|&i| !h.graph.has_edge(h.a[i], y)).collect())
            .collect();
        Ok(Layout { n, side, missing })
    }

    fn id(&self, copy: usize, v: Vertex) -> Vertex {
        match self.side[v] {
            (true, i) => i,
            (false, j) => self.n + copy * self.n + j,
        }
    }

    fn graph(&self, h: &Graph, copies: usize) -> Result<Graph> {
        let total = self.n + copies * self.n;
        if total > DEFAULT_MAX_VERTICES * 1024 {
            return Err(Error::CapExceeded {
                what: "glued vertices".into(),
                required: total as u128,
                cap: (DEFAULT_MAX_VERTICES * 1024) as u128,
            });
        }
        let mut g = Graph::empty(total);
        for i in 0..self.n {
            g.set_label(i, format!("A{i}"));
        }
        let edges = h.edges();
        for c in 0..copies {
            for &(u, v) in &edges {
                g.add_edge(self.id(c, u), self.id(c, v));
            }
        }
        Ok(g)
    }

    fn record<K>(&self, keys: Vec<K>) -> CompositionRecord<K> {
        CompositionRecord {
            h2_vertices: (0..self.n).collect(),
            copies: keys
                .into_iter()
                .enumerate()
                .map(|(c, key)| CopyRecord {
                    key,
                    clique: (0..self.n).collect(),
                    vertices: (0..2 * self.n).map(|v| self.id(c, v)).collect(),
                })
                .collect(),
        }
    }

    fn b_ids(&self, copy: usize) -> Vec<Vertex> {
        (0..self.n).map(|j| self.n + copy * self.n + j).collect()
    }
}

fn check_cap(what: &str, required: u128, cap: usize) -> Result<usize> {
    if required > cap as u128 {
        return Err(Error::CapExceeded {
            what: what.into(),
            required,
            cap: cap as u128,
        });
    }
    Ok(required as usize)
}

#[derive(Clone, Debug)]
pub struct ThmkqBundle {
    /// λ = {k_1..k_q}, classes `X_j ∪ Y_j`, composition record keyed by the injection.
    pub witness: Witness,
    pub steiner: SteinerGraph,
    pub params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct ThmkqSection {
    n: usize,
    #[serde(with = "ratio_text")]
    eps: Rational,
    q: usize,
    ks: Vec<u32>,
    y: usize,
    universe: usize,
    steiner: SteinerGraph,
}

impl ThmkqBundle {
    pub fn copies(&self) -> &[CopyRecord] {
        &self.witness.composition.as_ref().expect("thmkq record").copies
    }

    /// Clique `B_c` against the pools left by `c` on `A`.
    pub fn copy_extension(&self, i: usize) -> SdrOutcome {
        let n = self.steiner.n;
        let copy = &self.copies()[i];
        let b: Vec<Vertex> = (0..n).map(|j| n + i * n + j).collect();
        clique_extension(&self.witness.graph, &self.witness.lists, &copy.clique, &copy.key, &b)
    }
}

/// `G` for λ = {k_1..k_q}: colours are numbered from 1 as `X_1, Y_1, X_2, Y_2, …` with
/// `|X_j| = k_j` and `|Y_j| = ⌊ε'n⌋`, where `ε' = h.eps`.
pub fn build_thmkq(h: &SteinerGraph, ks: &[u32], cap: usize) -> Result<ThmkqBundle> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::invalid("ks must be a non-empty list of positive integers"));
    }
    let lay = Layout::new(h)?;
    let n = h.n;
    let y = floor_times(h.eps, n);
    let mut next: Color = 1;
    let mut xs: Vec<Color> = Vec::new();
    let mut classes = Vec::new();
    for &k in ks {
        let x: Vec<Color> = (next..next + k).collect();
        let yj: Vec<Color> = (next + k..next + k + y as Color).collect();
        next += k + y as Color;
        xs.extend(&x);
        classes.push(x.into_iter().chain(yj).collect::<ColorSet>());
    }
    let universe: ColorSet = (1..next).collect();
    let total = falling(xs.len() as u128, n as u128);
    if total == 0 {
        return Err(Error::invalid(format!("no injection of {n} vertices into {} colours", xs.len())));
    }
    let copies = check_cap("thmkq copies", total, cap)?;
    let keys: Vec<Vec<Color>> = xs.iter().copied().permutations(n).collect();
    let graph = lay.graph(&h.graph, copies)?;
    let x_all: ColorSet = xs.iter().copied().collect();
    let mut lists = vec![x_all; graph.n()];
    for (c, key) in keys.iter().enumerate() {
        for (j, miss) in lay.missing.iter().enumerate() {
            let mut l = universe.clone();
            for &i in miss {
                l.remove(&key[i]);
            }
            lists[n + c * n + j] = l;
        }
    }
    let t = steiner_t(n, h.eps);
    let lam = Lambda::new(ks.to_vec())?;
    let section = section_json(
        "thmkq",
        ThmkqSection {
            n,
            eps: h.eps,
            q: ks.len(),
            ks: ks.to_vec(),
            y,
            universe: universe.len(),
            steiner: h.clone(),
        },
    );
    let witness = Witness::new(
        graph,
        lam,
        ColourClasses::new(classes),
        ListAssignment::new(lists),
        t,
        format!("thmkq(n={n},eps={},ks={})", h.eps, ks.iter().join(",")),
    )
    .with_composition(lay.record(keys))
    .with_gadget(section);
    Ok(ThmkqBundle {
        witness,
        steiner: h.clone(),
        params: json!({
            "n": n, "eps": h.eps.to_string(), "q": ks.len(), "ks": ks,
            "y": y, "t": t, "copies": copies, "universe": universe.len(),
        }),
    })
}

/// Counting hypotheses of the thmkq argument for a bundle's parameters.
fn thmkq_certificate(s: &ThmkqSection, w: &Witness) -> Result<CertificateReport> {
    let n = s.n;
    let sum: usize = s.ks.iter().map(|&k| k as usize).sum();
    let rep = verify_steiner(&s.steiner.graph, &s.steiner.a, &s.steiner.b, n, s.eps, DEFAULT_BUDGET)?;
    let copies_ok = w.composition.as_ref().is_some_and(|rec| {
        let h_edges = s.steiner.graph.edges();
        rec.copies.iter().all(|c| w.graph.induced(&c.vertices).edges() == h_edges)
    });
    Ok(CertificateReport::from_checks(vec![
        cert(
            "sum k_j + q*floor(eps'n) <= 2n-1",
            sum + s.q * s.y < 2 * n,
            format!("{} <= {}", sum + s.q * s.y, 2 * n - 1),
        ),
        cert(
            "every copy induces H on A and its B_c",
            copies_ok,
            String::new(),
        ),
        cert(
            "H: two n-cliques, at most floor(eps'n) non-neighbours",
            rep.cliques == CheckStatus::Pass && rep.non_neighbors == CheckStatus::Pass,
            format!("max non-neighbours {} <= {}", rep.max_non_neighbors, rep.bound),
        ),
        cert(
            "H has no K_t minor and t <= witness t",
            rep.minor == CheckStatus::Pass && rep.t <= w.t,
            format!("t = {}, witness t = {}, minor {:?}", rep.t, w.t, rep.minor),
        ),
    ]))
}

pub(super) fn verify_section(w: &Witness, section: &serde_json::Value) -> Result<GadgetCheck> {
    let s: ThmkqSection = serde_json::from_value(section.clone())?;
    let mut notes = Vec::new();
    let cert = thmkq_certificate(&s, w)?;
    for c in cert.violated() {
        notes.push(format!("certificate: {} fails ({})", c.name, c.detail));
    }
    let copies = w.composition.as_ref().map_or(0, |r| r.copies.len());
    let rebuilt = build_thmkq(&s.steiner, &s.ks, copies.max(DEFAULT_GADGET_COPY_CAP))?;
    let mut failures = Vec::new();
    if rebuilt.witness.graph != w.graph {
        failures.push("graph differs from the rebuilt gadget".to_string());
    }
    if rebuilt.witness.lists != w.lists || rebuilt.witness.lambda != w.lambda || rebuilt.witness.classes != w.classes {
        failures.push("lists, λ or classes differ from the rebuilt gadget".to_string());
    }
    if rebuilt.witness.composition != w.composition {
        failures.push("copy record differs from the rebuilt gadget".to_string());
    }
    let universe = w.lists.universe().len();
    if universe != s.universe || universe >= 2 * s.n {
        failures.push(format!("universe has {universe} colours, pigeonhole needs <= {}", 2 * s.n - 1));
    }
    Ok(super::section_status(&failures, copies as u128, notes, Some(cert.holds)))
}

#[derive(Clone, Debug)]
pub struct AbBundle {
    pub graph: Graph,
    pub lists: ListAssignment,
    /// Copies keyed by the m-subsets `c(x)`, one per injection `A → D`.
    pub record: CompositionRecord<Vec<ColorSet>>,
    pub steiner: SteinerGraph,
    pub m: usize,
    pub params: serde_json::Value,
}

impl AbBundle {
    /// Copies whose injection has pairwise disjoint images, i.e. can colour `A`.
    pub fn active(&self) -> Vec<usize> {
        (0..self.record.copies.len())
            .filter(|&i| {
                let key = &self.record.copies[i].key;
                key.iter().tuple_combinations().all(|(x, y)| x.is_disjoint(y))
            })
            .collect()
    }

    /// An m-fold colouring of copy `i` extending its key on `A`, if one exists.
    pub fn copy_extension(&self, i: usize) -> Result<Option<FoldColoring>> {
        let copy = &self.record.copies[i];
        let sub = self.graph.induced(&copy.vertices);
        let lists = ListAssignment::new(copy.vertices.iter().map(|&v| self.lists.get(v).clone()).collect());
        let pos: BTreeMap<Vertex, usize> = copy.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let partial: BTreeMap<Vertex, ColorSet> = copy
            .clique
            .iter()
            .zip(&copy.key)
            .map(|(v, s)| (pos[v], s.clone()))
            .collect();
        find_bfold(&sub, &lists, self.m, Some(&partial))
    }
}

/// `G` with m-fold lists `[2nm−1] ∖ ⋃ c(x)` over non-neighbours `x ∈ A`, one copy of
/// `H` per injection `c: A → D`, `D` the m-subsets of `[2nm−1]` in lexicographic order.
pub fn build_ab(h: &SteinerGraph, m: usize, cap: usize) -> Result<AbBundle> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    let lay = Layout::new(h)?;
    let n = h.n;
    let size = 2 * n * m - 1;
    let universe: ColorSet = (1..=size as Color).collect();
    let d_family: Vec<ColorSet> = (1..=size as Color)
        .combinations(m)
        .map(|s| s.into_iter().collect())
        .collect();
    let total = falling(d_family.len() as u128, n as u128);
    let copies = check_cap("ab copies", total, cap)?;
    let keys: Vec<Vec<ColorSet>> = (0..d_family.len())
        .permutations(n)
        .map(|p| p.into_iter().map(|i| d_family[i].clone()).collect())
        .collect();
    let graph = lay.graph(&h.graph, copies)?;
    let mut lists = vec![universe.clone(); graph.n()];
    for (c, key) in keys.iter().enumerate() {
        for (j, miss) in lay.missing.iter().enumerate() {
            let mut l = universe.clone();
            for &i in miss {
                for x in &key[i] {
                    l.remove(x);
                }
            }
            lists[n + c * n + j] = l;
        }
    }
    let y = floor_times(h.eps, n);
    let record = lay.record(keys);
    let b = AbBundle {
        graph,
        lists: ListAssignment::new(lists),
        record,
        steiner: h.clone(),
        m,
        params: json!({}),
    };
    let active = b.active().len();
    Ok(AbBundle {
        params: json!({
            "n": n, "m": m, "eps": h.eps.to_string(), "y": y, "t": steiner_t(n, h.eps),
            "universe": size, "D": d_family.len(), "copies": copies, "active": active,
            "min_list": size - y * m,
        }),
        ..b
    })
}

/// B-vertex ids of copy `i` in a bundle built over an `n`-clique `A`.
pub fn copy_b_ids(n: usize, i: usize) -> Vec<Vertex> {
    Layout {
        n,
        side: Vec::new(),
        missing: Vec::new(),
    }
    .b_ids(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{verify_witness, MinorMode, Overall};

    fn r(p: u64, q: u64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn epsilon_prime_formula() {
        let e = epsilon_prime(r(1, 2), 1);
        assert_eq!(e, r(1, 20));
        assert!(check_epsilon_prime(r(1, 2), 1, e));
        for q in 1..6 {
            for (p, d) in [(1, 10), (1, 3), (1, 2), (9, 10)] {
                assert!(check_epsilon_prime(r(p, d), q, epsilon_prime(r(p, d), q)));
            }
        }
        assert!(!check_epsilon_prime(r(1, 2), 1, r(1, 2)));
    }

    #[test]
    fn thmkq_toy() {
        let h = default_steiner(4, r(1, 2)).unwrap();
        let b = build_thmkq(&h, &[5], DEFAULT_GADGET_COPY_CAP).unwrap();
        assert_eq!(b.copies().len(), 120);
        assert_eq!(b.witness.lists.universe().len(), 7);
        assert_eq!(b.witness.graph.n(), 4 + 120 * 4);
        for v in 4..b.witness.graph.n() {
            assert_eq!(b.witness.lists.get(v).len(), 5);
        }
        for i in 0..120 {
            assert!(matches!(b.copy_extension(i), SdrOutcome::HallViolator { .. }));
        }
    }

    #[test]
    fn thmkq_witness_verifies_by_certificate() {
        let h = default_steiner(4, r(1, 2)).unwrap();
        let mut w = build_thmkq(&h, &[5], DEFAULT_GADGET_COPY_CAP).unwrap().witness;
        let rep = verify_witness(&mut w, MinorMode::Certificate).unwrap();
        assert_eq!(rep.overall, Overall::Verified, "{:?}", rep.notes);
    }

    #[test]
    fn thmkq_cap() {
        let h = default_steiner(4, r(1, 2)).unwrap();
        let err = build_thmkq(&h, &[5], 100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { required: 120, .. }));
    }

    #[test]
    fn ab_toy() {
        let h = default_steiner(2, r(1, 2)).unwrap();
        let b = build_ab(&h, 2, DEFAULT_GADGET_COPY_CAP).unwrap();
        assert_eq!(b.record.copies.len(), 420);
        let active = b.active();
        assert_eq!(active.len(), 210);
        for v in 2..b.graph.n() {
            assert_eq!(b.lists.get(v).len(), 5);
        }
        for i in active {
            assert!(b.copy_extension(i).unwrap().is_none());
        }
    }

    #[test]
    fn ab_with_m1_matches_thmkq() {
        let h = default_steiner(4, r(1, 2)).unwrap();
        let ab = build_ab(&h, 1, DEFAULT_GADGET_COPY_CAP).unwrap();
        let kq = build_thmkq(&h, &[5], DEFAULT_GADGET_COPY_CAP).unwrap();
        let by_key: BTreeMap<Vec<Color>, usize> = ab
            .record
            .copies
            .iter()
            .enumerate()
            .map(|(i, c)| (c.key.iter().map(|s| *s.first().unwrap()).collect(), i))
            .collect();
        for (i, copy) in kq.copies().iter().enumerate() {
            let j = by_key[&copy.key];
            for (x, y) in copy_b_ids(4, i).into_iter().zip(copy_b_ids(4, j)) {
                assert_eq!(kq.witness.lists.get(x), ab.lists.get(y));
            }
        }
    }
}
