//! `h1` for λ = {1⋆(t−5a−9), 3⋆(2a+3)}: A split into a+2 triples, a (t−a−3)-clique
//! B, and every vertex of B joined to two vertices of each triple.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cert, clique_extension, falling, section_json, section_status, CertificateReport, GadgetCheck};
use crate::error::{Error, Result};
use crate::graph::{is_clique, Graph, Vertex, DEFAULT_MAX_VERTICES};
use crate::lambda::Lambda;
use crate::lists::{is_valid_assignment, Color, ColorSet, ColourClasses, ListAssignment, Palette};
use crate::obstacle::{FnResponder, ObstacleFamily};
use crate::sdr::SdrOutcome;
use crate::witness::Witness;

/// `m = 3^{a+2}`, the number of patterns `X`.
pub fn thm3_m(a: usize) -> u128 {
    3u128.pow(a as u32 + 2)
}

/// `t_2 = (2a+5)·m + a + 3`.
pub fn thm3_t2(a: usize) -> u128 {
    (2 * a as u128 + 5) * thm3_m(a) + a as u128 + 3
}

#[derive(Clone, Debug)]
pub struct Thm3Gadget {
    pub graph: Graph,
    pub a: usize,
    pub t: usize,
    pub triples: Vec<[Vertex; 3]>,
    pub b_set: Vec<Vertex>,
    /// `(X, B_X)` for every `X` meeting each triple in two vertices, lexicographic.
    pub families: Vec<(Vec<Vertex>, Vec<Vertex>)>,
    pub in_regime: bool,
}

/// Colours `d^j_r`, `b_i`, `c_j`, `c^j_r` for `j < 2a+3`, `r < 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm3Palette {
    pub d: Vec<[Color; 3]>,
    pub b: Vec<Color>,
    pub c: Vec<Color>,
    pub cc: Vec<[Color; 3]>,
}

impl Thm3Palette {
    pub fn d_colours(&self) -> ColorSet {
        self.d.iter().flatten().copied().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct Family {
    #[serde(rename = "X")]
    x: Vec<Vertex>,
    #[serde(rename = "B_X")]
    b_x: Vec<Vertex>,
}

#[derive(Serialize, Deserialize)]
struct Section {
    a: usize,
    t: usize,
    m: u128,
    triples: Vec<[Vertex; 3]>,
    #[serde(rename = "B")]
    b_set: Vec<Vertex>,
    families: Vec<Family>,
    in_regime: bool,
}

fn patterns(triples: &[[Vertex; 3]]) -> Vec<Vec<Vertex>> {
    triples
        .iter()
        .map(|tr| tr.iter().copied().combinations(2).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|pairs| pairs.concat())
        .collect()
}

pub fn build_thm3(a: usize, t: usize) -> Result<Thm3Gadget> {
    if t < a + 3 {
        return Err(Error::invalid(format!("t = {t} is below a+3 = {}", a + 3)));
    }
    let p = 3 * (a + 2);
    let n = p + t - a - 3;
    if n > DEFAULT_MAX_VERTICES {
        return Err(Error::CapExceeded {
            what: "thm3 vertices".into(),
            required: n as u128,
            cap: DEFAULT_MAX_VERTICES as u128,
        });
    }
    let triples: Vec<[Vertex; 3]> = (0..a + 2).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
    let b_set: Vec<Vertex> = (p..n).collect();
    let pats = patterns(&triples);
    let mut g = Graph::empty(n);
    for u in 0..p {
        for v in u + 1..p {
            g.add_edge(u, v);
        }
        g.set_label(u, format!("u{}_{}", u / 3 + 1, u % 3 + 1));
    }
    for (i, &u) in b_set.iter().enumerate() {
        for &v in &b_set[i + 1..] {
            g.add_edge(u, v);
        }
        let x = &pats[i % pats.len()];
        for &w in x {
            g.add_edge(u, w);
        }
        g.set_label(u, format!("B:X={{{}}}", x.iter().join(",")));
    }
    Thm3Gadget::from_parts(g, a, t, triples, b_set)
}

impl Thm3Gadget {
    /// Re-derives the families `B_X` from the graph itself.
    pub fn from_parts(graph: Graph, a: usize, t: usize, triples: Vec<[Vertex; 3]>, b_set: Vec<Vertex>) -> Result<Self> {
        if triples.len() != a + 2 {
            return Err(Error::invalid(format!("{} triples, expected {}", triples.len(), a + 2)));
        }
        if triples.iter().flatten().chain(&b_set).any(|&v| v >= graph.n()) {
            return Err(Error::invalid("A/B vertex out of range"));
        }
        let pats = patterns(&triples);
        let mut by_x: BTreeMap<BTreeSet<Vertex>, Vec<Vertex>> =
            pats.iter().map(|x| (x.iter().copied().collect(), Vec::new())).collect();
        let a_all: Vec<Vertex> = triples.iter().flatten().copied().collect();
        for &v in &b_set {
            let nx: BTreeSet<Vertex> = a_all.iter().copied().filter(|&u| graph.has_edge(u, v)).collect();
            if let Some(list) = by_x.get_mut(&nx) {
                list.push(v);
            }
        }
        let families = pats
            .into_iter()
            .map(|x| {
                let key: BTreeSet<Vertex> = x.iter().copied().collect();
                let bx = by_x[&key].clone();
                (x, bx)
            })
            .collect();
        Ok(Thm3Gadget {
            in_regime: t as u128 >= thm3_t2(a),
            graph,
            a,
            t,
            triples,
            b_set,
            families,
        })
    }

    pub fn a_set(&self) -> Vec<Vertex> {
        self.triples.iter().flatten().copied().collect()
    }

    pub fn m(&self) -> usize {
        self.families.len()
    }

    pub fn palette(&self) -> Result<Thm3Palette> {
        if self.t < 5 * self.a + 9 {
            return Err(Error::invalid(format!(
                "t = {} leaves no room for λ = {{1*(t-5a-9), 3*(2a+3)}}",
                self.t
            )));
        }
        let groups = 2 * self.a + 3;
        let mut p = Palette::starting_at(1);
        let triple = |p: &mut Palette| -> [Color; 3] { [p.fresh(), p.fresh(), p.fresh()] };
        let d = (0..groups).map(|_| triple(&mut p)).collect();
        let b = p.fresh_n(self.t - 5 * self.a - 9);
        let c = p.fresh_n(groups);
        let cc = (0..groups).map(|_| triple(&mut p)).collect();
        Ok(Thm3Palette { d, b, c, cc })
    }

    /// Triple `i` onto `d^i_1, d^i_2, d^i_3`.
    pub fn canonical_psi(&self) -> Result<Vec<Color>> {
        let pal = self.palette()?;
        Ok((0..self.triples.len()).flat_map(|i| pal.d[i]).collect())
    }

    pub fn lambda(&self) -> Result<Lambda> {
        Lambda::from_runs(&[(1, self.t - 5 * self.a - 9), (3, 2 * self.a + 3)])
    }

    /// `I(ψ)`: the d-groups used by the triples, in triple order.
    pub fn groups_of(&self, psi: &[Color]) -> Result<Vec<usize>> {
        let pal = self.palette()?;
        let a_len = 3 * self.triples.len();
        if psi.len() != a_len {
            return Err(Error::invalid(format!("psi colours {} vertices, A has {a_len}", psi.len())));
        }
        let mut groups = Vec::with_capacity(self.triples.len());
        for (i, chunk) in psi.chunks(3).enumerate() {
            let g = pal
                .d
                .iter()
                .position(|d| d[..] == *chunk)
                .ok_or_else(|| Error::invalid(format!("psi is not triple-structured on triple {}", i + 1)))?;
            if groups.contains(&g) {
                return Err(Error::invalid(format!("psi uses d-group {} twice", g + 1)));
            }
            groups.push(g);
        }
        Ok(groups)
    }

    pub fn family(&self) -> Result<ObstacleFamily> {
        let (_, lam, classes) = thm3_lists(self, &self.canonical_psi()?)?;
        let me = self.clone();
        ObstacleFamily::new(
            self.graph.clone(),
            self.a_set(),
            lam,
            classes,
            Box::new(FnResponder(move |psi: &[Color]| Ok(thm3_lists(&me, psi)?.0))),
        )
    }

    pub fn extension(&self, psi: &[Color]) -> Result<SdrOutcome> {
        let (lists, _, _) = thm3_lists(self, psi)?;
        Ok(clique_extension(&self.graph, &lists, &self.a_set(), psi, &self.b_set))
    }

    /// Size of the colour pool left to B once ψ is placed on A.
    pub fn extension_pool(&self, psi: &[Color]) -> Result<usize> {
        let (lists, _, _) = thm3_lists(self, psi)?;
        let a_all = self.a_set();
        let mut pool = ColorSet::new();
        for &v in &self.b_set {
            let mut l = lists.get(v).clone();
            for (&u, c) in a_all.iter().zip(psi) {
                if self.graph.has_edge(u, v) {
                    l.remove(c);
                }
            }
            pool.extend(l);
        }
        Ok(pool.len())
    }

    pub fn section(&self) -> serde_json::Value {
        section_json(
            "thm3",
            Section {
                a: self.a,
                t: self.t,
                m: thm3_m(self.a),
                triples: self.triples.clone(),
                b_set: self.b_set.clone(),
                families: self
                    .families
                    .iter()
                    .map(|(x, b_x)| Family {
                        x: x.clone(),
                        b_x: b_x.clone(),
                    })
                    .collect(),
                in_regime: self.in_regime,
            },
        )
    }

    pub fn witness(&self, psi: &[Color]) -> Result<Witness> {
        let (lists, lam, classes) = thm3_lists(self, psi)?;
        Ok(Witness::new(
            self.graph.clone(),
            lam,
            classes,
            lists,
            self.t,
            format!("thm3(a={},t={})", self.a, self.t),
        )
        .with_obstacle(self.a_set(), psi.to_vec())
        .with_gadget(self.section()))
    }

    /// Every triple-structured ψ, groups assigned in lexicographic order.
    pub fn all_psi(&self) -> Result<Vec<Vec<Color>>> {
        let pal = self.palette()?;
        Ok((0..pal.d.len())
            .permutations(self.triples.len())
            .map(|gs| gs.iter().flat_map(|&g| pal.d[g]).collect())
            .collect())
    }
}

/// Lists (LA')/(LB') for a triple-structured ψ (`psi[3i + r]` colours `u^{i+1}_{r+1}`),
/// with λ = {1⋆(t−5a−9), 3⋆(2a+3)} and classes `{b_i}` then
/// `{d^j_1, d^j_2, d^j_3, c_j, c^j_1, c^j_2, c^j_3}`.
pub fn thm3_lists(g: &Thm3Gadget, psi: &[Color]) -> Result<(ListAssignment, Lambda, ColourClasses)> {
    let pal = g.palette()?;
    let used: BTreeSet<usize> = g.groups_of(psi)?.into_iter().collect();
    let a_all = g.a_set();
    let b: ColorSet = pal.b.iter().copied().collect();
    let mut lists = vec![ColorSet::new(); g.graph.n()];
    let a_list: ColorSet = pal.d_colours().union(&b).copied().collect();
    for &v in &a_all {
        lists[v] = a_list.clone();
    }
    let mut b_common = b.clone();
    for j in 0..pal.d.len() {
        if used.contains(&j) {
            b_common.insert(pal.c[j]);
        } else {
            b_common.extend(pal.cc[j]);
        }
    }
    for &v in &g.b_set {
        let mut l = b_common.clone();
        for (&u, &col) in a_all.iter().zip(psi) {
            if g.graph.has_edge(u, v) {
                l.insert(col);
            }
        }
        lists[v] = l;
    }
    let mut classes: Vec<ColorSet> = pal.b.iter().map(|&x| ColorSet::from([x])).collect();
    for j in 0..pal.d.len() {
        let mut cl: ColorSet = pal.d[j].iter().copied().collect();
        cl.insert(pal.c[j]);
        cl.extend(pal.cc[j]);
        classes.push(cl);
    }
    Ok((ListAssignment::new(lists), g.lambda()?, ColourClasses::new(classes)))
}

/// Structural hypotheses and `3(a+2) + (t−a−3) − min|B_X| < t − 1`.
pub fn verify_thm3_certificate(g: &Thm3Gadget) -> CertificateReport {
    let (a, t) = (g.a as i128, g.t as i128);
    let m = thm3_m(g.a) as i128;
    let floor = (t - a - 3) / m;
    let min_bx = g.families.iter().map(|(_, b)| b.len()).min().unwrap_or(0) as i128;
    let a_all = g.a_set();
    let pattern_ok = g.b_set.iter().all(|&v| {
        g.triples
            .iter()
            .all(|tr| tr.iter().filter(|&&u| g.graph.has_edge(u, v)).count() == 2)
    });
    let lhs = 3 * (a + 2) + (t - a - 3) - min_bx;
    let checks = vec![
        cert(
            "A is a 3(a+2)-clique in a+2 triples",
            g.triples.len() == g.a + 2 && a_all.iter().all_unique() && is_clique(&g.graph, &a_all).unwrap_or(false),
            format!("|A| = {}", a_all.len()),
        ),
        cert(
            "B is a (t-a-3)-clique",
            g.b_set.len() + g.a + 3 == g.t && is_clique(&g.graph, &g.b_set).unwrap_or(false),
            format!("|B| = {}", g.b_set.len()),
        ),
        cert(
            "no other vertices",
            a_all.len() + g.b_set.len() == g.graph.n(),
            format!("n = {}", g.graph.n()),
        ),
        cert(
            "every B vertex meets each triple in exactly 2",
            pattern_ok,
            String::new(),
        ),
        cert(
            "|B_X| >= floor((t-a-3)/m) for every X",
            min_bx >= floor,
            format!("min |B_X| = {min_bx}, floor = {floor}, m = {m}"),
        ),
        cert(
            "3(a+2)+(t-a-3)-min|B_X| < t-1",
            lhs < t - 1,
            format!("{lhs} < {}", t - 1),
        ),
    ];
    CertificateReport::from_checks(checks)
}

/// d-groups whose three colours all occur in `psi`.
pub fn complete_d_triples(psi: &[Color], pal: &Thm3Palette) -> Vec<usize> {
    let used: BTreeSet<Color> = psi.iter().copied().collect();
    (0..pal.d.len())
        .filter(|&j| pal.d[j].iter().all(|c| used.contains(c)))
        .collect()
}

/// `a+2` triples of vertices, triple `i` coloured `d^{j}_1, d^{j}_2, d^{j}_3` for
/// distinct groups `j` (the smallest complete groups), flattened in order.
pub fn pattern_clique_thm3(psi: &[Color], pal: &Thm3Palette, a: usize) -> Option<Vec<Vertex>> {
    let groups = complete_d_triples(psi, pal);
    if groups.len() < a + 2 {
        return None;
    }
    let mut out = Vec::with_capacity(3 * (a + 2));
    for &j in &groups[..a + 2] {
        for c in pal.d[j] {
            out.push(psi.iter().position(|&x| x == c)?);
        }
    }
    Some(out)
}

/// `5a+7` distinct d-colours with only `a+1` complete groups: groups `0..=a` in full
/// and two colours from each of the remaining `a+2` groups.
pub fn boundary_colouring_thm3(pal: &Thm3Palette, a: usize) -> Vec<Color> {
    let mut out = Vec::new();
    for (j, d) in pal.d.iter().enumerate() {
        if j <= a {
            out.extend(d);
        } else {
            out.extend(&d[..2]);
        }
    }
    out
}

pub(super) fn verify_section(w: &Witness, section: &serde_json::Value) -> Result<GadgetCheck> {
    let s: Section = serde_json::from_value(section.clone())?;
    let g = Thm3Gadget::from_parts(w.graph.clone(), s.a, s.t, s.triples, s.b_set)?;
    let mut notes = Vec::new();
    let cert = verify_thm3_certificate(&g);
    for c in cert.violated() {
        notes.push(format!("certificate: {} fails ({})", c.name, c.detail));
    }
    if w.t != g.t {
        notes.push(format!("witness t = {} but gadget t = {}", w.t, g.t));
    }
    let mut failures = Vec::new();
    if let Some(ob) = &w.obstacle {
        let (lists, lam, classes) = thm3_lists(&g, &ob.psi)?;
        if ob.clique != g.a_set() || lists != w.lists || lam != w.lambda || classes != w.classes {
            failures.push("witness lists differ from the gadget lists for its ψ".to_string());
        }
    }
    // H_2 = K_{t-1} keeps at least 5a+8 d-coloured vertices; 5a+7 forces a+2 groups
    let pal = g.palette()?;
    let a = g.a;
    if (g.t - 1) - pal.b.len() <= 3 * (a + 1) + 2 * (a + 2) {
        failures.push("pattern clique is not guaranteed".into());
    }
    let domain = falling(pal.d.len() as u128, g.triples.len() as u128);
    if domain > super::DEFAULT_PSI_CAP {
        return Err(Error::CapExceeded {
            what: "thm3 ψ domain".into(),
            required: domain,
            cap: super::DEFAULT_PSI_CAP,
        });
    }
    let a_all = g.a_set();
    let mut bad: Vec<String> = g
        .all_psi()?
        .par_iter()
        .filter_map(|psi| {
            let ok = thm3_lists(&g, psi).and_then(|(l, lam, c)| {
                let valid = is_valid_assignment(&g.graph, &l, &lam, &c)?.is_ok();
                let blocked = matches!(
                    clique_extension(&g.graph, &l, &a_all, psi, &g.b_set),
                    SdrOutcome::HallViolator { .. }
                );
                Ok(valid && blocked)
            });
            (!matches!(ok, Ok(true))).then(|| format!("{psi:?}"))
        })
        .collect();
    bad.sort();
    failures.extend(bad);
    Ok(section_status(&failures, domain, notes, Some(cert.holds)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        assert_eq!(thm3_m(0), 9);
        assert_eq!(thm3_t2(0), 48);
        assert_eq!(thm3_m(1), 27);
        assert_eq!(thm3_t2(1), 193);
    }

    #[test]
    fn a0_t48_shape() {
        let g = build_thm3(0, 48).unwrap();
        assert_eq!(g.graph.n(), 51);
        assert_eq!(g.a_set().len(), 6);
        assert_eq!(g.b_set.len(), 45);
        assert_eq!(g.m(), 9);
        assert!(g.families.iter().all(|(_, b)| b.len() == 5));
        assert!(verify_thm3_certificate(&g).holds);
    }

    #[test]
    fn lists_are_valid_with_the_stated_quotas() {
        let g = build_thm3(0, 48).unwrap();
        let psi = g.canonical_psi().unwrap();
        let (l, lam, c) = thm3_lists(&g, &psi).unwrap();
        assert_eq!(lam.to_string(), "1*39,3*3");
        assert_eq!(is_valid_assignment(&g.graph, &l, &lam, &c).unwrap(), Ok(()));
        let v = g.b_set[0];
        for j in 0..3 {
            let have = l.get(v).intersection(&c.classes[39 + j]).count();
            assert_eq!(have, 3, "group {j}");
        }
    }

    #[test]
    fn extension_pool_is_t_minus_a_minus_4() {
        let g = build_thm3(0, 48).unwrap();
        for psi in g.all_psi().unwrap() {
            assert_eq!(g.extension_pool(&psi).unwrap(), 44);
            assert!(matches!(g.extension(&psi).unwrap(), SdrOutcome::HallViolator { .. }));
        }
    }

    #[test]
    fn unstructured_psi_rejected() {
        let g = build_thm3(0, 48).unwrap();
        let mut psi = g.canonical_psi().unwrap();
        psi.swap(0, 1);
        assert!(matches!(thm3_lists(&g, &psi), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn eight_of_nine_d_colours_give_two_groups() {
        let g = build_thm3(0, 48).unwrap();
        let pal = g.palette().unwrap();
        let all: Vec<Color> = pal.d_colours().into_iter().collect();
        for subset in all.iter().copied().combinations(8) {
            assert!(complete_d_triples(&subset, &pal).len() >= 2);
            let sel = pattern_clique_thm3(&subset, &pal, 0).unwrap();
            assert_eq!(sel.len(), 6);
        }
    }

    #[test]
    fn boundary_colouring_defeats_the_selector() {
        for a in 0..3 {
            let g = build_thm3(a, 5 * a + 9).unwrap();
            let pal = g.palette().unwrap();
            let psi = boundary_colouring_thm3(&pal, a);
            assert_eq!(psi.len(), 5 * a + 7);
            assert_eq!(complete_d_triples(&psi, &pal).len(), a + 1);
            assert!(pattern_clique_thm3(&psi, &pal, a).is_none());
        }
    }
}
