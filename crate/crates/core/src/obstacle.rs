//! Obstacles, the composition that turns them into non-colourable graphs, and the
//! apex step that lifts a witness from `t − 1` to `t`.
//!
//! An obstacle family fixes a graph `h1` with an ordered clique `k`. For a colouring
//! `psi` of `k` (given as the colour of `k[i]` at position `i`), the responder supplies
//! lists on `h1` under which `psi` does not extend. Composition glues one copy of `h1`
//! onto `h2` for every proper colouring of `h2`, so no colouring of `h2` survives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coloring::find_coloring;
use crate::error::{Error, Result};
use crate::graph::{glue_copy, is_clique, Graph, Vertex};
use crate::lambda::Lambda;
use crate::lists::{is_valid_assignment, Color, ColorSet, ColourClasses, ListAssignment};
use crate::witness::{CheckStatus, CompositionRecord, CopyRecord, Witness};

/// Default limit on the number of copies a composition may materialise.
pub const DEFAULT_COPY_CAP: usize = 1_000_000;

/// Maps a colouring of the family's clique to lists on `h1`.
pub trait Responder: Send + Sync {
    fn respond(&self, psi: &[Color]) -> Result<ListAssignment>;

    /// Serialisable form, when the responder has one.
    fn spec(&self) -> Option<ResponderSpec> {
        None
    }
}

/// Data-only responders, as read from family files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponderSpec {
    /// The same lists for every `psi`.
    Fixed(ListAssignment),
    /// Lists looked up by the exact clique colouring.
    Table(Vec<TableEntry>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub psi: Vec<Color>,
    pub lists: ListAssignment,
}

impl Responder for ResponderSpec {
    fn respond(&self, psi: &[Color]) -> Result<ListAssignment> {
        match self {
            ResponderSpec::Fixed(l) => Ok(l.clone()),
            ResponderSpec::Table(rows) => rows
                .iter()
                .find(|r| r.psi == psi)
                .map(|r| r.lists.clone())
                .ok_or_else(|| Error::Precondition(format!("no response for psi {psi:?}"))),
        }
    }

    fn spec(&self) -> Option<ResponderSpec> {
        Some(self.clone())
    }
}

/// Responder backed by a closure.
pub struct FnResponder<F>(pub F);

impl<F> Responder for FnResponder<F>
where
    F: Fn(&[Color]) -> Result<ListAssignment> + Send + Sync,
{
    fn respond(&self, psi: &[Color]) -> Result<ListAssignment> {
        (self.0)(psi)
    }
}

pub struct ObstacleFamily {
    pub h1: Graph,
    pub k: Vec<Vertex>,
    pub lam: Lambda,
    pub classes: ColourClasses,
    pub respond: Box<dyn Responder>,
}

impl std::fmt::Debug for ObstacleFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObstacleFamily")
            .field("h1", &self.h1)
            .field("k", &self.k)
            .field("lam", &self.lam)
            .finish_non_exhaustive()
    }
}

/// JSON form of a family with a data-only responder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub h1: Graph,
    pub k: Vec<Vertex>,
    pub lambda: Lambda,
    pub classes: ColourClasses,
    pub respond: ResponderSpec,
}

impl ObstacleFamily {
    pub fn new(
        h1: Graph,
        k: Vec<Vertex>,
        lam: Lambda,
        classes: ColourClasses,
        respond: Box<dyn Responder>,
    ) -> Result<Self> {
        if !is_clique(&h1, &k)? {
            return Err(Error::invalid("family clique k is not a clique of h1"));
        }
        if classes.len() != lam.len() {
            return Err(Error::invalid(format!(
                "{} classes for {} parts",
                classes.len(),
                lam.len()
            )));
        }
        Ok(ObstacleFamily { h1, k, lam, classes, respond })
    }

    pub fn from_file(f: FamilyFile) -> Result<Self> {
        ObstacleFamily::new(f.h1, f.k, f.lambda, f.classes, Box::new(f.respond))
    }

    pub fn to_file(&self) -> Option<FamilyFile> {
        Some(FamilyFile {
            h1: self.h1.clone(),
            k: self.k.clone(),
            lambda: self.lam.clone(),
            classes: self.classes.clone(),
            respond: self.respond.spec()?,
        })
    }

    pub fn p(&self) -> usize {
        self.k.len()
    }

    /// Lists for `psi`, checked to be a (λ, C)-assignment under which `psi` is a
    /// proper colouring of `k`.
    pub fn lists_for(&self, psi: &[Color]) -> Result<(ListAssignment, BTreeMap<Vertex, Color>)> {
        if psi.len() != self.k.len() {
            return Err(Error::invalid(format!(
                "psi colours {} vertices, clique has {}",
                psi.len(),
                self.k.len()
            )));
        }
        let lists = self.respond.respond(psi)?;
        lists.check_carrier(&self.h1)?;
        if let Err(v) = is_valid_assignment(&self.h1, &lists, &self.lam, &self.classes)? {
            return Err(Error::Precondition(format!(
                "response to psi {psi:?} is not a valid assignment: {v}"
            )));
        }
        let mut partial = BTreeMap::new();
        for (i, (&v, &c)) in self.k.iter().zip(psi).enumerate() {
            if psi[..i].contains(&c) {
                return Err(Error::invalid(format!("psi {psi:?} repeats colour {c} on the clique")));
            }
            if !lists.get(v).contains(&c) {
                return Err(Error::invalid(format!(
                    "psi colour {c} is not in the list of clique vertex {v}"
                )));
            }
            partial.insert(v, c);
        }
        Ok((lists, partial))
    }
}

/// True iff `psi` on the family clique does not extend to an L-colouring of `h1`,
/// where `L = respond(psi)`.
pub fn check_obstacle(fam: &ObstacleFamily, psi: &[Color]) -> Result<bool> {
    let (lists, partial) = fam.lists_for(psi)?;
    Ok(find_coloring(&fam.h1, &lists, Some(&partial))?.is_none())
}

/// All proper L-colourings of `g`, vertices in id order and colours ascending.
pub fn proper_colorings(g: &Graph, l: &ListAssignment, cap: usize) -> Result<Vec<Vec<Color>>> {
    l.check_carrier(g)?;
    let mut out = Vec::new();
    let mut cur: Vec<Color> = Vec::with_capacity(g.n());
    fn rec(g: &Graph, l: &ListAssignment, cap: usize, cur: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) -> Result<()> {
        let v = cur.len();
        if v == g.n() {
            if out.len() == cap {
                return Err(Error::CapExceeded {
                    what: "proper colourings".into(),
                    required: cap as u128 + 1,
                    cap: cap as u128,
                });
            }
            out.push(cur.clone());
            return Ok(());
        }
        for &c in l.get(v) {
            if g.neighbors(v).ones().take_while(|&u| u < v).all(|u| cur[u] != c) {
                cur.push(c);
                rec(g, l, cap, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    rec(g, l, cap, &mut cur, &mut out)?;
    Ok(out)
}

/// Output of [`compose`].
#[derive(Clone, Debug)]
pub struct Composition {
    pub graph: Graph,
    pub lists: ListAssignment,
    pub record: CompositionRecord,
    pub warning: Option<String>,
}

impl Composition {
    /// The composed graph with copy `i`'s private vertices removed, with its lists.
    pub fn without_copy(&self, i: usize) -> (Graph, ListAssignment, Vec<Vertex>) {
        let copy = &self.record.copies[i];
        let removed = copy
            .vertices
            .iter()
            .copied()
            .filter(|v| !copy.clique.contains(v))
            .collect();
        let (g, ids) = self.graph.without(&removed);
        let lists = ListAssignment::new(ids.iter().map(|&v| self.lists.get(v).clone()).collect());
        (g, lists, ids)
    }
}

/// Selects, for a colouring of `h2` (colour per vertex), the clique of `h2` that the
/// family's clique is glued onto, ordered to match the family clique.
pub type Select<'a> = dyn Fn(&[Color]) -> Option<Vec<Vertex>> + Sync + 'a;

/// Glues one copy of `fam.h1` onto `h2` per proper `l2`-colouring of `h2`.
///
/// Each copy's clique `k` is identified with `select(psi)` position by position, and its
/// private vertices take the lists `respond(psi restricted to select(psi))`. The result
/// has no L-colouring: every colouring of `h2` is blocked by its own copy.
pub fn compose(
    fam: &ObstacleFamily,
    h2: &Graph,
    l2: &ListAssignment,
    select: &Select<'_>,
    cap: usize,
) -> Result<Composition> {
    l2.check_carrier(h2)?;
    if let Err(v) = is_valid_assignment(h2, l2, &fam.lam, &fam.classes)? {
        return Err(Error::Precondition(format!("h2 lists are not a valid assignment: {v}")));
    }
    let colorings = proper_colorings(h2, l2, cap)?;
    let h2_vertices: Vec<Vertex> = (0..h2.n()).collect();
    if colorings.is_empty() {
        return Ok(Composition {
            graph: h2.clone(),
            lists: l2.clone(),
            record: CompositionRecord {
                h2_vertices,
                copies: Vec::new(),
            },
            warning: Some("h2 has no proper colouring from its lists; returned unchanged".into()),
        });
    }
    let mut graph = h2.clone();
    let mut lists = l2.lists.clone();
    let mut copies = Vec::with_capacity(colorings.len());
    for psi in colorings {
        let clique = select(&psi)
            .ok_or_else(|| Error::Precondition(format!("select found no clique for psi {psi:?}")))?;
        if clique.len() != fam.p() || !is_clique(h2, &clique)? {
            return Err(Error::Precondition(format!(
                "select returned {clique:?} for psi {psi:?}, not a {}-clique of h2",
                fam.p()
            )));
        }
        let key: Vec<Color> = clique.iter().map(|&v| psi[v]).collect();
        if !check_obstacle(fam, &key)? {
            return Err(Error::Precondition(format!(
                "colouring {key:?} of the selected clique extends into h1 (psi {psi:?})"
            )));
        }
        let response = fam.respond.respond(&key)?;
        let map = glue_copy(&mut graph, &clique, &fam.h1, &fam.k);
        lists.resize(graph.n(), ColorSet::new());
        for v in 0..fam.h1.n() {
            if !fam.k.contains(&v) {
                lists[map[v]] = response.get(v).clone();
            }
        }
        copies.push(CopyRecord {
            key: psi,
            clique,
            vertices: map,
        });
    }
    Ok(Composition {
        graph,
        lists: ListAssignment::new(lists),
        record: CompositionRecord { h2_vertices, copies },
        warning: None,
    })
}

/// Shape of an apex-step input: singleton colours `c_1..c_{t-4}` and the big class.
struct ApexShape {
    singles: Vec<Color>,
    big: usize,
}

fn apex_shape(w: &Witness) -> Result<ApexShape> {
    let singles_needed = w.lambda.len() - 1;
    let expected = Lambda::from_runs(&[(1, singles_needed), (2, 1)])?;
    if w.lambda != expected {
        return Err(Error::Precondition(format!(
            "apex step needs lambda {{1*s,2}}, got {}",
            w.lambda
        )));
    }
    let big: Vec<usize> = (0..w.classes.len())
        .filter(|&i| w.classes.classes[i].len() != 1)
        .collect();
    if big.len() != 1 || w.classes.len() != w.lambda.len() {
        return Err(Error::Precondition(
            "apex step needs singleton classes plus one class of quota 2".into(),
        ));
    }
    let singles: Vec<Color> = (0..w.classes.len())
        .filter(|&i| i != big[0])
        .map(|i| *w.classes.classes[i].iter().next().unwrap())
        .collect();
    if let Err(v) = is_valid_assignment(&w.graph, &w.lists, &w.lambda, &w.classes)? {
        return Err(Error::Precondition(format!("input lists are not a valid assignment: {v}")));
    }
    Ok(ApexShape { singles, big: big[0] })
}

/// The apex obstacle family, the triangle `h2` with its lists and the new classes,
/// built from `w` without checking that `w` is verified.
pub fn apex_extend(w: &Witness) -> Result<(ObstacleFamily, Graph, ListAssignment)> {
    let shape = apex_shape(w)?;
    let n = w.graph.n();
    let universe: ColorSet = w
        .lists
        .universe()
        .into_iter()
        .chain(w.classes.classes.iter().flatten().copied())
        .collect();
    let fresh = universe.iter().next_back().map_or(0, |&c| c + 1);
    let big = &w.classes.classes[shape.big];
    let mut ab = big.iter().copied();
    let (a, b) = (ab.next().unwrap(), ab.next().unwrap());

    let mut h1 = w.graph.clone();
    let u = n;
    let mut edges = h1.edges();
    edges.extend((0..n).map(|v| (v, u)));
    let labels = h1.labels().clone();
    h1 = Graph::from_edges(n + 1, &edges)?;
    for (v, l) in labels {
        h1.set_label(v, l);
    }
    h1.set_label(u, "apex");

    let mut top: ColorSet = shape.singles.iter().copied().collect();
    top.insert(fresh);
    top.insert(a);
    top.insert(b);
    let mut lists: Vec<ColorSet> = w
        .lists
        .lists
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.insert(fresh);
            l
        })
        .collect();
    lists.push(top.clone());

    let mut classes: Vec<ColorSet> = shape.singles.iter().map(|&c| ColorSet::from([c])).collect();
    classes.push(ColorSet::from([fresh]));
    classes.push(big.clone());
    let lam = Lambda::from_runs(&[(1, shape.singles.len() + 1), (2, 1)])?;

    let fam = ObstacleFamily::new(
        h1,
        vec![u],
        lam,
        ColourClasses::new(classes),
        Box::new(ResponderSpec::Fixed(ListAssignment::new(lists))),
    )?;
    let h2 = Graph::complete(3);
    let l2 = ListAssignment::uniform(3, &top);
    Ok((fam, h2, l2))
}

/// Lifts a verified witness for `t − 1` with λ = {1⋆(t−4), 2} to a witness for `t`
/// with λ' = {1⋆(t−3), 2}: adds a universal apex, a fresh singleton colour, and
/// composes over a triangle whose lists leave only two colours outside the singletons.
pub fn apex_step(w: &Witness) -> Result<Witness> {
    let v = &w.verification;
    let ok = |s: CheckStatus| s == CheckStatus::Pass;
    if !ok(v.assignment) || !ok(v.coloring) || !matches!(v.minor, CheckStatus::Pass | CheckStatus::Skipped) {
        return Err(Error::Precondition("apex step needs a verified input witness".into()));
    }
    let (fam, h2, l2) = apex_extend(w)?;
    let singles: ColorSet = fam
        .classes
        .classes
        .iter()
        .filter(|c| c.len() == 1)
        .flatten()
        .copied()
        .collect();
    let select = |psi: &[Color]| (0..3).find(|&v| singles.contains(&psi[v])).map(|v| vec![v]);
    let comp = compose(&fam, &h2, &l2, &select, DEFAULT_COPY_CAP)?;
    Ok(Witness::new(
        comp.graph,
        fam.lam.clone(),
        fam.classes.clone(),
        comp.lists,
        w.t + 1,
        format!("apex({})", w.provenance),
    )
    .with_composition(comp.record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;
    use crate::minor::{find_kt_minor, DEFAULT_BUDGET};

    fn set(xs: &[Color]) -> ColorSet {
        xs.iter().copied().collect()
    }

    /// `h1 = K_3`, clique `[0]`, one class `{1,2,3}` with quota 2. The two other
    /// vertices both get `{c, z}` with `z` the largest colour other than `c`.
    pub(crate) fn toy_family() -> ObstacleFamily {
        let respond = FnResponder(|psi: &[Color]| {
            let c = psi[0];
            let z = (1..=3).rev().find(|&x| x != c).unwrap();
            Ok(ListAssignment::uniform(3, &set(&[c, z])))
        });
        ObstacleFamily::new(
            Graph::complete(3),
            vec![0],
            parse_lambda("2").unwrap(),
            ColourClasses::new(vec![set(&[1, 2, 3])]),
            Box::new(respond),
        )
        .unwrap()
    }

    #[test]
    fn toy_family_blocks_every_colour() {
        let fam = toy_family();
        for c in 1..=3 {
            assert!(check_obstacle(&fam, &[c]).unwrap());
        }
    }

    #[test]
    fn extra_fresh_colour_breaks_the_obstacle() {
        let respond = FnResponder(|psi: &[Color]| {
            let c = psi[0];
            let z = (1..=3).rev().find(|&x| x != c).unwrap();
            let mut l = vec![set(&[c, z]); 3];
            l[1].insert(4);
            l[2].insert(4);
            Ok(ListAssignment::new(l))
        });
        let fam = ObstacleFamily::new(
            Graph::complete(3),
            vec![0],
            parse_lambda("2").unwrap(),
            ColourClasses::new(vec![set(&[1, 2, 3, 4])]),
            Box::new(respond),
        )
        .unwrap();
        assert!(!check_obstacle(&fam, &[1]).unwrap());
    }

    #[test]
    fn psi_outside_lists_is_invalid() {
        let fam = ObstacleFamily::new(
            Graph::complete(2),
            vec![0],
            parse_lambda("1").unwrap(),
            ColourClasses::new(vec![set(&[1])]),
            Box::new(ResponderSpec::Fixed(ListAssignment::uniform(2, &set(&[1])))),
        )
        .unwrap();
        assert!(matches!(check_obstacle(&fam, &[2]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn toy_composition_is_not_colourable() {
        let fam = toy_family();
        let h2 = Graph::complete(2);
        let l2 = ListAssignment::uniform(2, &set(&[1, 2]));
        let comp = compose(&fam, &h2, &l2, &|_| Some(vec![0]), DEFAULT_COPY_CAP).unwrap();
        assert_eq!(comp.record.copies.len(), 2);
        assert_eq!(comp.graph.n(), 6);
        assert_eq!(find_coloring(&comp.graph, &comp.lists, None).unwrap(), None);
        for i in 0..2 {
            let (g, l, ids) = comp.without_copy(i);
            let key = &comp.record.copies[i].key;
            let partial: BTreeMap<Vertex, Color> =
                (0..2).map(|v| (ids.iter().position(|&x| x == v).unwrap(), key[v])).collect();
            assert!(find_coloring(&g, &l, Some(&partial)).unwrap().is_some());
        }
        assert_eq!(find_kt_minor(&comp.graph, 4, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn no_proper_colouring_returns_h2_with_warning() {
        let fam = toy_family();
        let g3 = Graph::complete(3);
        let l3 = ListAssignment::uniform(3, &set(&[1, 2]));
        let comp = compose(&fam, &g3, &l3, &|_| Some(vec![0]), DEFAULT_COPY_CAP).unwrap();
        assert!(comp.warning.is_some());
        assert_eq!(comp.graph, g3);
    }

    #[test]
    fn bad_selection_names_psi() {
        let fam = toy_family();
        let h2 = Graph::complete(2);
        let l2 = ListAssignment::uniform(2, &set(&[1, 2]));
        let err = compose(&fam, &h2, &l2, &|_| Some(vec![0, 1]), DEFAULT_COPY_CAP).unwrap_err();
        assert!(err.to_string().contains("psi"));
    }

    #[test]
    fn copy_cap_is_enforced() {
        let fam = toy_family();
        let h2 = Graph::complete(2);
        let l2 = ListAssignment::uniform(2, &set(&[1, 2]));
        assert!(matches!(
            compose(&fam, &h2, &l2, &|_| Some(vec![0]), 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn proper_colouring_count_of_triangle() {
        let l = ListAssignment::uniform(3, &set(&[1, 2, 3, 4, 5]));
        assert_eq!(proper_colorings(&Graph::complete(3), &l, 1000).unwrap().len(), 60);
    }
}
