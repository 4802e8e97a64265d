//! `h1` for λ = {1⋆(t−2a−6), 3a+6}: a (2a+5)-clique A, a (t−2)-clique B, and every
//! vertex of B joined to exactly one (a+3)-subset of A.

use std::collections::BTreeMap;

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

/// `m = C(2a+5, a+3)`.
pub fn thm2_m(a: usize) -> u128 {
    super::binomial(2 * a as u128 + 5, a as u128 + 3)
}

/// `t_1 = (2a+5)·m + 2`, the smallest `t` covered by the counting argument.
pub fn thm2_t1(a: usize) -> u128 {
    (2 * a as u128 + 5) * thm2_m(a) + 2
}

#[derive(Clone, Debug)]
pub struct Thm2Gadget {
    pub graph: Graph,
    pub a: usize,
    pub t: usize,
    pub a_set: Vec<Vertex>,
    pub b_set: Vec<Vertex>,
    /// `(X, B_X)` for every (a+3)-subset `X` of `A`, subsets in lexicographic order.
    pub families: Vec<(Vec<Vertex>, Vec<Vertex>)>,
    pub in_regime: bool,
}

/// Colours `b_1..b_{t−2a−6}`, `a_1..a_{3a+6}`, `c_1..c_{2a+3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm2Palette {
    pub b: Vec<Color>,
    pub a: Vec<Color>,
    pub c: Vec<Color>,
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
    #[serde(rename = "A")]
    a_set: Vec<Vertex>,
    #[serde(rename = "B")]
    b_set: Vec<Vertex>,
    families: Vec<Family>,
    in_regime: bool,
}

pub fn build_thm2(a: usize, t: usize) -> Result<Thm2Gadget> {
    let p = 2 * a + 5;
    if t < p {
        return Err(Error::invalid(format!("t = {t} is below |A| = {p}")));
    }
    let n = p + t - 2;
    if n > DEFAULT_MAX_VERTICES {
        return Err(Error::CapExceeded {
            what: "thm2 vertices".into(),
            required: n as u128,
            cap: DEFAULT_MAX_VERTICES as u128,
        });
    }
    let a_set: Vec<Vertex> = (0..p).collect();
    let b_set: Vec<Vertex> = (p..n).collect();
    let subsets: Vec<Vec<Vertex>> = a_set.iter().copied().combinations(a + 3).collect();
    let mut g = Graph::empty(n);
    for (i, &u) in a_set.iter().enumerate() {
        for &v in &a_set[i + 1..] {
            g.add_edge(u, v);
        }
        g.set_label(u, format!("A{}", i + 1));
    }
    for (i, &u) in b_set.iter().enumerate() {
        for &v in &b_set[i + 1..] {
            g.add_edge(u, v);
        }
        let x = &subsets[i % subsets.len()];
        for &w in x {
            g.add_edge(u, w);
        }
        g.set_label(u, format!("B:X={{{}}}", x.iter().join(",")));
    }
    Thm2Gadget::from_parts(g, a, t, a_set, b_set)
}

impl Thm2Gadget {
    /// Re-derives the families `B_X` from the graph itself.
    pub fn from_parts(graph: Graph, a: usize, t: usize, a_set: Vec<Vertex>, b_set: Vec<Vertex>) -> Result<Self> {
        if a_set.len() != 2 * a + 5 {
            return Err(Error::invalid(format!("|A| = {}, expected {}", a_set.len(), 2 * a + 5)));
        }
        if a_set.iter().chain(&b_set).any(|&v| v >= graph.n()) {
            return Err(Error::invalid("A/B vertex out of range"));
        }
        let mut by_x: BTreeMap<Vec<Vertex>, Vec<Vertex>> = a_set
            .iter()
            .copied()
            .combinations(a + 3)
            .map(|x| (x, Vec::new()))
            .collect();
        let mut order: Vec<Vec<Vertex>> = by_x.keys().cloned().collect();
        order.sort_by_key(|x| x.iter().map(|v| a_set.iter().position(|u| u == v).unwrap()).collect::<Vec<_>>());
        for &v in &b_set {
            let nx: Vec<Vertex> = a_set.iter().copied().filter(|&u| graph.has_edge(u, v)).collect();
            if let Some(list) = by_x.get_mut(&nx) {
                list.push(v);
            }
        }
        let families = order
            .into_iter()
            .map(|x| {
                let bx = by_x.remove(&x).unwrap();
                (x, bx)
            })
            .collect();
        Ok(Thm2Gadget {
            in_regime: t as u128 >= thm2_t1(a),
            graph,
            a,
            t,
            a_set,
            b_set,
            families,
        })
    }

    pub fn m(&self) -> usize {
        self.families.len()
    }

    pub fn palette(&self) -> Result<Thm2Palette> {
        if self.t < 2 * self.a + 6 {
            return Err(Error::invalid(format!(
                "t = {} leaves no room for λ = {{1*(t-2a-6), 3a+6}}",
                self.t
            )));
        }
        let mut p = Palette::starting_at(1);
        Ok(Thm2Palette {
            b: p.fresh_n(self.t - 2 * self.a - 6),
            a: p.fresh_n(3 * self.a + 6),
            c: p.fresh_n(2 * self.a + 3),
        })
    }

    /// `A` in id order onto `a_1..a_{2a+5}`.
    pub fn canonical_psi(&self) -> Result<Vec<Color>> {
        Ok(self.palette()?.a[..self.a_set.len()].to_vec())
    }

    pub fn lambda(&self) -> Result<Lambda> {
        Lambda::from_runs(&[(1, self.t - 2 * self.a - 6), (3 * self.a as u32 + 6, 1)])
    }

    /// `h1` with clique `A`, responding with the lists for each ψ.
    pub fn family(&self) -> Result<ObstacleFamily> {
        let (_, lam, classes) = thm2_lists(self, &self.canonical_psi()?)?;
        let me = self.clone();
        ObstacleFamily::new(
            self.graph.clone(),
            self.a_set.clone(),
            lam,
            classes,
            Box::new(FnResponder(move |psi: &[Color]| Ok(thm2_lists(&me, psi)?.0))),
        )
    }

    /// Pools available to B once ψ is placed on A, as an SDR problem.
    pub fn extension(&self, psi: &[Color]) -> Result<SdrOutcome> {
        let (lists, _, _) = thm2_lists(self, psi)?;
        Ok(clique_extension(&self.graph, &lists, &self.a_set, psi, &self.b_set))
    }

    pub fn section(&self) -> serde_json::Value {
        section_json(
            "thm2",
            Section {
                a: self.a,
                t: self.t,
                m: thm2_m(self.a),
                a_set: self.a_set.clone(),
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

    /// `h1` with the lists for `psi` and the obstacle `psi` on `A`.
    pub fn witness(&self, psi: &[Color]) -> Result<Witness> {
        let (lists, lam, classes) = thm2_lists(self, psi)?;
        Ok(Witness::new(
            self.graph.clone(),
            lam,
            classes,
            lists,
            self.t,
            format!("thm2(a={},t={})", self.a, self.t),
        )
        .with_obstacle(self.a_set.clone(), psi.to_vec())
        .with_gadget(self.section()))
    }

    /// Every injection `A → {a_i}`, in lexicographic order.
    pub fn all_psi(&self) -> Result<impl Iterator<Item = Vec<Color>>> {
        let pal = self.palette()?;
        Ok(pal.a.into_iter().permutations(self.a_set.len()))
    }
}

/// Lists (LA)/(LB) for an injection `psi: A → {a_i}` (`psi[i]` colours `A[i]`),
/// with λ = {1⋆(t−2a−6), 3a+6} and classes `{b_1}, …, {b_{t−2a−6}}, {a_i} ∪ {c_i}`.
pub fn thm2_lists(g: &Thm2Gadget, psi: &[Color]) -> Result<(ListAssignment, Lambda, ColourClasses)> {
    let pal = g.palette()?;
    if psi.len() != g.a_set.len() || !psi.iter().all_unique() || !psi.iter().all(|c| pal.a.contains(c)) {
        return Err(Error::invalid(format!("psi {psi:?} is not an injection into the a-colours")));
    }
    let b: ColorSet = pal.b.iter().copied().collect();
    let a_all: ColorSet = pal.a.iter().copied().collect();
    let c: ColorSet = pal.c.iter().copied().collect();
    let mut lists = vec![ColorSet::new(); g.graph.n()];
    for &v in &g.a_set {
        lists[v] = b.union(&a_all).copied().collect();
    }
    for &v in &g.b_set {
        let mut l: ColorSet = b.union(&c).copied().collect();
        for (&u, &col) in g.a_set.iter().zip(psi) {
            if g.graph.has_edge(u, v) {
                l.insert(col);
            }
        }
        lists[v] = l;
    }
    let mut classes: Vec<ColorSet> = pal.b.iter().map(|&x| ColorSet::from([x])).collect();
    classes.push(a_all.union(&c).copied().collect());
    Ok((ListAssignment::new(lists), g.lambda()?, ColourClasses::new(classes)))
}

/// Structural hypotheses and the inequality `(2a+5) + (t−2) − min|B_X| < t − 1`.
pub fn verify_thm2_certificate(g: &Thm2Gadget) -> CertificateReport {
    let (a, t) = (g.a as i128, g.t as i128);
    let m = thm2_m(g.a) as i128;
    let floor = (t - 2) / m;
    let min_bx = g.families.iter().map(|(_, b)| b.len()).min().unwrap_or(0) as i128;
    let exact_degrees = g.b_set.iter().all(|&v| {
        g.a_set.iter().filter(|&&u| g.graph.has_edge(u, v)).count() == g.a + 3
    });
    let lhs = (2 * a + 5) + (t - 2) - min_bx;
    let checks = vec![
        cert(
            "A is a (2a+5)-clique",
            g.a_set.len() == g.a * 2 + 5 && is_clique(&g.graph, &g.a_set).unwrap_or(false),
            format!("|A| = {}", g.a_set.len()),
        ),
        cert(
            "B is a (t-2)-clique",
            g.b_set.len() + 2 == g.t && is_clique(&g.graph, &g.b_set).unwrap_or(false),
            format!("|B| = {}", g.b_set.len()),
        ),
        cert(
            "no other vertices",
            g.a_set.len() + g.b_set.len() == g.graph.n(),
            format!("n = {}", g.graph.n()),
        ),
        cert(
            "every B vertex has a+3 neighbours in A",
            exact_degrees,
            format!("a+3 = {}", g.a + 3),
        ),
        cert(
            "|B_X| >= floor((t-2)/m) for every X",
            min_bx >= floor,
            format!("min |B_X| = {min_bx}, floor = {floor}, m = {m}"),
        ),
        cert(
            "(2a+5)+(t-2)-min|B_X| < t-1",
            lhs < t - 1,
            format!("{lhs} < {}", t - 1),
        ),
    ];
    CertificateReport::from_checks(checks)
}

/// The first `2a+5` vertices (in id order) coloured by a-colours, if there are that many.
pub fn pattern_clique_thm2(psi: &[Color], pal: &Thm2Palette, a: usize) -> Option<Vec<Vertex>> {
    let picked: Vec<Vertex> = (0..psi.len())
        .filter(|&v| pal.a.contains(&psi[v]))
        .take(2 * a + 5)
        .collect();
    (picked.len() == 2 * a + 5).then_some(picked)
}

pub(super) fn verify_section(w: &Witness, section: &serde_json::Value) -> Result<GadgetCheck> {
    let s: Section = serde_json::from_value(section.clone())?;
    let g = Thm2Gadget::from_parts(w.graph.clone(), s.a, s.t, s.a_set, s.b_set)?;
    let mut notes = Vec::new();
    let cert = verify_thm2_certificate(&g);
    for c in cert.violated() {
        notes.push(format!("certificate: {} fails ({})", c.name, c.detail));
    }
    if w.t != g.t {
        notes.push(format!("witness t = {} but gadget t = {}", w.t, g.t));
    }
    let mut failures = Vec::new();
    if let Some(ob) = &w.obstacle {
        let (lists, lam, classes) = thm2_lists(&g, &ob.psi)?;
        if ob.clique != g.a_set || lists != w.lists || lam != w.lambda || classes != w.classes {
            failures.push("witness lists differ from the gadget lists for its ψ".to_string());
        }
    }
    // every colouring of H_2 = K_{t-1} leaves at least 2a+5 vertices for the a-colours
    let pal = g.palette()?;
    if (g.t - 1) - pal.b.len() < g.a_set.len() {
        failures.push("pattern clique is not guaranteed".into());
    }
    let domain = falling(pal.a.len() as u128, g.a_set.len() as u128);
    if domain > super::DEFAULT_PSI_CAP {
        return Err(Error::CapExceeded {
            what: "thm2 ψ domain".into(),
            required: domain,
            cap: super::DEFAULT_PSI_CAP,
        });
    }
    let psis: Vec<Vec<Color>> = g.all_psi()?.collect();
    let mut bad: Vec<String> = psis
        .par_iter()
        .filter_map(|psi| {
            let ok = thm2_lists(&g, psi).and_then(|(l, lam, c)| {
                let valid = is_valid_assignment(&g.graph, &l, &lam, &c)?.is_ok();
                let blocked = matches!(
                    clique_extension(&g.graph, &l, &g.a_set, psi, &g.b_set),
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
    use crate::coloring::find_coloring;

    #[test]
    fn parameters_at_a0_and_a1() {
        assert_eq!(thm2_m(0), 10);
        assert_eq!(thm2_t1(0), 52);
        assert_eq!(thm2_m(1), 35);
        assert_eq!(thm2_t1(1), 247);
    }

    #[test]
    fn a0_t52_shape() {
        let g = build_thm2(0, 52).unwrap();
        assert_eq!(g.graph.n(), 55);
        assert_eq!(g.a_set.len(), 5);
        assert_eq!(g.b_set.len(), 50);
        assert_eq!(g.m(), 10);
        assert!(g.families.iter().all(|(_, b)| b.len() == 5));
        assert!(g.in_regime);
        assert!(is_clique(&g.graph, &g.a_set).unwrap());
        assert_eq!(g.graph.label(5), Some("B:X={0,1,2}"));
    }

    #[test]
    fn lists_have_the_stated_sizes_and_validity() {
        let g = build_thm2(0, 52).unwrap();
        let psi = g.canonical_psi().unwrap();
        let (l, lam, c) = thm2_lists(&g, &psi).unwrap();
        assert_eq!(lam.to_string(), "1*46,6");
        assert!(l.lists.iter().all(|x| x.len() == 52));
        assert_eq!(is_valid_assignment(&g.graph, &l, &lam, &c).unwrap(), Ok(()));
    }

    #[test]
    fn certificate_at_and_below_t1() {
        assert!(verify_thm2_certificate(&build_thm2(0, 52).unwrap()).holds);
        let low = verify_thm2_certificate(&build_thm2(0, 20).unwrap());
        assert!(!low.holds);
        let v = low.violated();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].detail, "22 < 19");
    }

    #[test]
    fn canonical_psi_does_not_extend() {
        let g = build_thm2(0, 52).unwrap();
        let psi = g.canonical_psi().unwrap();
        match g.extension(&psi).unwrap() {
            SdrOutcome::HallViolator { lists, colors } => {
                assert_eq!(lists.len(), 50);
                assert_eq!(colors.len(), 49);
            }
            other => panic!("unexpected {other:?}"),
        }
        let (l, _, _) = thm2_lists(&g, &psi).unwrap();
        let partial = g.a_set.iter().copied().zip(psi.iter().copied()).collect();
        assert_eq!(find_coloring(&g.graph, &l, Some(&partial)).unwrap(), None);
    }

    #[test]
    fn non_injective_psi_rejected() {
        let g = build_thm2(0, 52).unwrap();
        let mut psi = g.canonical_psi().unwrap();
        psi[1] = psi[0];
        assert!(matches!(thm2_lists(&g, &psi), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn selector_pigeonhole_toy() {
        // 7 vertices from 4 b-colours and 3 a-colours: at least 3 a-coloured
        let pal = Thm2Palette {
            b: vec![1, 2, 3, 4],
            a: vec![5, 6, 7],
            c: vec![],
        };
        for psi in (1..=7).permutations(7) {
            let count = psi.iter().filter(|c| pal.a.contains(c)).count();
            assert!(count >= 3);
        }
    }
}
