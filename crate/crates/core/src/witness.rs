//! Witness bundles and their end-to-end verification.
//!
//! A witness asserts that `graph` has no K_t minor and no L-colouring from `lists`.
//! Two refinements keep the colouring claim checkable at scale:
//!
//! * an `obstacle` section narrows it to "this colouring of a clique does not extend";
//! * a `composition` section records how the graph was glued from `h2` and one copy
//!   per proper colouring of `h2`, so non-colourability is checked copy by copy.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{find_bfold, find_coloring, Coloring};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::lambda::Lambda;
use crate::lists::{is_valid_assignment, Color, ColorSet, ColourClasses, ListAssignment, Violation};
use crate::minor::{find_kt_minor, MinorModel, DEFAULT_BUDGET};

/// Limit on the colourings of `h2` enumerated while checking a composition.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    #[default]
    Pending,
    Pass,
    Fail,
    Skipped,
    Inconclusive,
}

impl CheckStatus {
    fn is_pending(&self) -> bool {
        *self == CheckStatus::Pending
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    #[serde(default)]
    pub assignment: CheckStatus,
    #[serde(default)]
    pub coloring: CheckStatus,
    #[serde(default)]
    pub minor: CheckStatus,
    /// Whole-domain check recorded by a gadget section, when present.
    #[serde(default, skip_serializing_if = "CheckStatus::is_pending")]
    pub gadget: CheckStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinorMode {
    Exact,
    Certificate,
    Skip,
}

impl FromStr for MinorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-minor" => Ok(MinorMode::Exact),
            "certificate" => Ok(MinorMode::Certificate),
            "skip" | "skip-minor" => Ok(MinorMode::Skip),
            other => Err(Error::invalid(format!("unknown minor mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Verified,
    PartiallyVerified,
    Failed,
    Inconclusive,
}

/// A colouring of `clique` (position by position) that the lists must block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub clique: Vec<Vertex>,
    pub psi: Vec<Color>,
}

/// One glued copy: `key` colours the `h2` vertices (in `h2_vertices` order), `clique`
/// lists the `h2` vertices it was glued onto, `vertices[v]` is the id of the copy's
/// vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyRecord<K = Vec<Color>> {
    pub key: K,
    pub clique: Vec<Vertex>,
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionRecord<K = Vec<Color>> {
    pub h2_vertices: Vec<Vertex>,
    pub copies: Vec<CopyRecord<K>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HBound {
    pub lambda: Lambda,
    pub h_at_most: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub graph: Graph,
    pub lambda: Lambda,
    pub classes: ColourClasses,
    pub lists: ListAssignment,
    pub t: usize,
    pub provenance: String,
    #[serde(default)]
    pub verification: Verification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<ObstacleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<CompositionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadget: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<HBound>,
}

impl Witness {
    pub fn new(
        graph: Graph,
        lambda: Lambda,
        classes: ColourClasses,
        lists: ListAssignment,
        t: usize,
        provenance: impl Into<String>,
    ) -> Self {
        Witness {
            graph,
            lambda,
            classes,
            lists,
            t,
            provenance: provenance.into(),
            verification: Verification::default(),
            obstacle: None,
            composition: None,
            gadget: None,
            bounds: Vec::new(),
        }
    }

    pub fn with_obstacle(mut self, clique: Vec<Vertex>, psi: Vec<Color>) -> Self {
        self.obstacle = Some(ObstacleSpec { clique, psi });
        self
    }

    pub fn with_composition(mut self, record: CompositionRecord) -> Self {
        self.composition = Some(record);
        self
    }

    pub fn with_gadget(mut self, section: serde_json::Value) -> Self {
        self.gadget = Some(section);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Witness> {
        let w: Witness = serde_json::from_str(text)?;
        w.lists.check_carrier(&w.graph)?;
        Ok(w)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub verification: Verification,
    pub overall: Overall,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Coloring>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minor_model: Option<MinorModel>,
    pub notes: Vec<String>,
}

fn overall(v: &Verification) -> Overall {
    let core = [v.assignment, v.coloring, v.minor];
    if core.contains(&CheckStatus::Fail) || v.gadget == CheckStatus::Fail {
        Overall::Failed
    } else if core.contains(&CheckStatus::Inconclusive)
        || core.contains(&CheckStatus::Pending)
        || v.gadget == CheckStatus::Inconclusive
    {
        Overall::Inconclusive
    } else if v.minor == CheckStatus::Skipped {
        Overall::PartiallyVerified
    } else {
        Overall::Verified
    }
}

/// Runs every check the witness supports and records the outcome in
/// `w.verification`. Re-running gives the same report.
pub fn verify_witness(w: &mut Witness, mode: MinorMode) -> Result<VerificationReport> {
    w.lists.check_carrier(&w.graph)?;
    let mut notes = Vec::new();
    let mut v = Verification::default();
    let mut report_violation = None;
    let mut report_coloring = None;
    let mut report_model = None;

    match is_valid_assignment(&w.graph, &w.lists, &w.lambda, &w.classes)? {
        Ok(()) => v.assignment = CheckStatus::Pass,
        Err(violation) => {
            notes.push(format!("assignment: {violation}"));
            report_violation = Some(violation);
            v.assignment = CheckStatus::Fail;
        }
    }

    v.coloring = if let Some(ob) = &w.obstacle {
        match obstacle_partial(&w.graph, &w.lists, ob) {
            Err(msg) => {
                notes.push(format!("obstacle: {msg}"));
                CheckStatus::Fail
            }
            Ok(partial) => match find_coloring(&w.graph, &w.lists, Some(&partial)) {
                Ok(None) => CheckStatus::Pass,
                Ok(Some(c)) => {
                    notes.push("obstacle: the clique colouring extends".into());
                    report_coloring = Some(c);
                    CheckStatus::Fail
                }
                Err(e) if e.is_inconclusive() => CheckStatus::Inconclusive,
                Err(e) => return Err(e),
            },
        }
    } else if let Some(rec) = &w.composition {
        let check = verify_composition(&w.graph, &w.lists, rec, DEFAULT_ENUMERATION_CAP)?;
        notes.extend(check.notes.iter().map(|n| format!("composition: {n}")));
        check.status
    } else {
        match find_coloring(&w.graph, &w.lists, None) {
            Ok(None) => CheckStatus::Pass,
            Ok(Some(c)) => {
                notes.push("coloring: an L-colouring exists".into());
                report_coloring = Some(c);
                CheckStatus::Fail
            }
            Err(e) if e.is_inconclusive() => CheckStatus::Inconclusive,
            Err(e) => return Err(e),
        }
    };

    let mut certificate = None;
    if w.gadget.is_some() {
        let g = crate::gadgets::verify_gadget_section(w)?;
        notes.extend(g.notes.iter().map(|n| format!("gadget: {n}")));
        v.gadget = g.status;
        certificate = g.certificate;
    }

    v.minor = match mode {
        MinorMode::Skip => CheckStatus::Skipped,
        MinorMode::Exact => match find_kt_minor(&w.graph, w.t, DEFAULT_BUDGET) {
            Ok(None) => CheckStatus::Pass,
            Ok(Some(m)) => {
                notes.push(format!("minor: found a K_{} model", w.t));
                report_model = Some(m);
                CheckStatus::Fail
            }
            Err(e) if e.is_inconclusive() => CheckStatus::Inconclusive,
            Err(e) => return Err(e),
        },
        MinorMode::Certificate => match certificate {
            Some(true) => CheckStatus::Pass,
            Some(false) => {
                notes.push("minor: the counting certificate does not apply".into());
                CheckStatus::Inconclusive
            }
            None => {
                notes.push("minor: no counting certificate for this witness".into());
                CheckStatus::Inconclusive
            }
        },
    };

    w.verification = v.clone();
    Ok(VerificationReport {
        overall: overall(&v),
        verification: v,
        violation: report_violation,
        coloring: report_coloring,
        minor_model: report_model,
        notes,
    })
}

fn obstacle_partial(
    g: &Graph,
    l: &ListAssignment,
    ob: &ObstacleSpec,
) -> std::result::Result<BTreeMap<Vertex, Color>, String> {
    if ob.clique.len() != ob.psi.len() {
        return Err("clique and psi lengths differ".into());
    }
    let mut partial = BTreeMap::new();
    for (&v, &c) in ob.clique.iter().zip(&ob.psi) {
        if v >= g.n() || !l.get(v).contains(&c) {
            return Err(format!("psi colour {c} on vertex {v} is not allowed by its list"));
        }
        if partial.iter().any(|(&u, &cu)| cu == c && g.has_edge(u, v)) {
            return Err(format!("psi is improper at vertex {v}"));
        }
        partial.insert(v, c);
    }
    Ok(partial)
}

/// Outcome of checking a composed graph copy by copy.
#[derive(Clone, Debug, Serialize)]
pub struct CompositionCheck {
    pub status: CheckStatus,
    pub checked: usize,
    /// Keys of copies whose clique colouring extends, sorted.
    pub failures: Vec<String>,
    /// Colourings of `h2` with no copy, sorted.
    pub missing: Vec<String>,
    pub notes: Vec<String>,
}

fn structure_notes<K>(g: &Graph, rec: &CompositionRecord<K>) -> Vec<String> {
    let mut notes = Vec::new();
    let h2: BTreeSet<Vertex> = rec.h2_vertices.iter().copied().collect();
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for (i, copy) in rec.copies.iter().enumerate() {
        if !copy.clique.iter().all(|v| h2.contains(v) && copy.vertices.contains(v)) {
            notes.push(format!("copy {i}: glued clique is not inside h2 and the copy"));
        }
        for &v in &copy.vertices {
            if v >= g.n() {
                notes.push(format!("copy {i}: vertex {v} out of range"));
            } else if !h2.contains(&v) {
                if owner[v].is_some() {
                    notes.push(format!("vertex {v} is private to two copies"));
                }
                owner[v] = Some(i);
            }
        }
    }
    for v in 0..g.n() {
        if !h2.contains(&v) && owner[v].is_none() {
            notes.push(format!("vertex {v} is neither in h2 nor in a copy"));
        }
    }
    for (u, v) in g.edges() {
        let ok = match (owner[u], owner[v]) {
            (None, None) => true,
            (Some(i), None) => rec.copies[i].vertices.contains(&v),
            (None, Some(j)) => rec.copies[j].vertices.contains(&u),
            (Some(i), Some(j)) => i == j,
        };
        if !ok {
            notes.push(format!("edge ({u},{v}) crosses between copies"));
        }
    }
    notes
}

fn copy_subgraph<K>(g: &Graph, l: &ListAssignment, copy: &CopyRecord<K>) -> (Graph, ListAssignment) {
    let sub = g.induced(&copy.vertices);
    let lists = ListAssignment::new(copy.vertices.iter().map(|&v| l.get(v).clone()).collect());
    (sub, lists)
}

/// Copy-by-copy non-colourability: every proper colouring of `h2` has a copy, the
/// copy's lists block it, and every edge lives inside `h2` or a single copy.
pub fn verify_composition(
    g: &Graph,
    l: &ListAssignment,
    rec: &CompositionRecord,
    cap: usize,
) -> Result<CompositionCheck> {
    let notes = structure_notes(g, rec);
    if !notes.is_empty() {
        return Ok(CompositionCheck {
            status: CheckStatus::Fail,
            checked: 0,
            failures: Vec::new(),
            missing: Vec::new(),
            notes,
        });
    }
    let h2 = g.induced(&rec.h2_vertices);
    let h2_lists = ListAssignment::new(rec.h2_vertices.iter().map(|&v| l.get(v).clone()).collect());
    let colorings = match crate::obstacle::proper_colorings(&h2, &h2_lists, cap) {
        Ok(c) => c,
        Err(e) if e.is_inconclusive() => {
            return Ok(CompositionCheck {
                status: CheckStatus::Inconclusive,
                checked: 0,
                failures: Vec::new(),
                missing: Vec::new(),
                notes: vec![e.to_string()],
            })
        }
        Err(e) => return Err(e),
    };
    let keys: BTreeSet<&Vec<Color>> = rec.copies.iter().map(|c| &c.key).collect();
    let missing: Vec<String> = colorings
        .iter()
        .filter(|c| !keys.contains(c))
        .map(|c| format!("{c:?}"))
        .collect();
    let position: BTreeMap<Vertex, usize> =
        rec.h2_vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let outcomes: Vec<Result<Option<bool>>> = rec
        .copies
        .par_iter()
        .map(|copy| {
            if copy.key.len() != rec.h2_vertices.len() {
                return Ok(Some(false));
            }
            let (sub, lists) = copy_subgraph(g, l, copy);
            let mut partial = BTreeMap::new();
            for &v in &copy.clique {
                let local = copy.vertices.iter().position(|&x| x == v).unwrap();
                partial.insert(local, copy.key[position[&v]]);
            }
            match find_coloring(&sub, &lists, Some(&partial)) {
                Ok(c) => Ok(Some(c.is_none())),
                Err(e) if e.is_inconclusive() => Ok(None),
                Err(Error::InvalidInput(_)) => Ok(Some(true)),
                Err(e) => Err(e),
            }
        })
        .collect();
    finish_check(rec, outcomes, missing)
}

fn finish_check<K: std::fmt::Debug>(
    rec: &CompositionRecord<K>,
    outcomes: Vec<Result<Option<bool>>>,
    missing: Vec<String>,
) -> Result<CompositionCheck> {
    let mut failures = Vec::new();
    let mut inconclusive = false;
    for (copy, o) in rec.copies.iter().zip(outcomes) {
        match o? {
            Some(true) => {}
            Some(false) => failures.push(format!("{:?}", copy.key)),
            None => inconclusive = true,
        }
    }
    failures.sort();
    let mut notes = Vec::new();
    if !failures.is_empty() {
        notes.push(format!("{} copies do not block their colouring", failures.len()));
    }
    if !missing.is_empty() {
        notes.push(format!("{} colourings of h2 have no copy", missing.len()));
    }
    let status = if !failures.is_empty() || !missing.is_empty() {
        CheckStatus::Fail
    } else if inconclusive {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Pass
    };
    Ok(CompositionCheck {
        status,
        checked: rec.copies.len(),
        failures,
        missing,
        notes,
    })
}

/// All b-fold L-colourings of `g`, vertices in id order, subsets in lexicographic order.
pub fn fold_colorings(g: &Graph, l: &ListAssignment, b: usize, cap: usize) -> Result<Vec<Vec<ColorSet>>> {
    l.check_carrier(g)?;
    fn rec(
        g: &Graph,
        l: &ListAssignment,
        b: usize,
        cap: usize,
        cur: &mut Vec<ColorSet>,
        out: &mut Vec<Vec<ColorSet>>,
    ) -> Result<()> {
        let v = cur.len();
        if v == g.n() {
            if out.len() == cap {
                return Err(Error::CapExceeded {
                    what: "fold colourings".into(),
                    required: cap as u128 + 1,
                    cap: cap as u128,
                });
            }
            out.push(cur.clone());
            return Ok(());
        }
        for pick in itertools::Itertools::combinations(l.get(v).iter().copied(), b) {
            let s: ColorSet = pick.into_iter().collect();
            if g.neighbors(v).ones().take_while(|&u| u < v).all(|u| cur[u].is_disjoint(&s)) {
                cur.push(s);
                rec(g, l, b, cap, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(g, l, b, cap, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// The b-fold analogue of [`verify_composition`]. Copies whose key is not a proper
/// b-fold colouring of `h2` can never be activated and are counted but not solved.
pub fn verify_fold_composition(
    g: &Graph,
    l: &ListAssignment,
    b: usize,
    rec: &CompositionRecord<Vec<ColorSet>>,
    cap: usize,
) -> Result<CompositionCheck> {
    let notes = structure_notes(g, rec);
    if !notes.is_empty() {
        return Ok(CompositionCheck {
            status: CheckStatus::Fail,
            checked: 0,
            failures: Vec::new(),
            missing: Vec::new(),
            notes,
        });
    }
    let h2 = g.induced(&rec.h2_vertices);
    let h2_lists = ListAssignment::new(rec.h2_vertices.iter().map(|&v| l.get(v).clone()).collect());
    let colorings = fold_colorings(&h2, &h2_lists, b, cap)?;
    let keys: BTreeSet<&Vec<ColorSet>> = rec.copies.iter().map(|c| &c.key).collect();
    let active: BTreeSet<&Vec<ColorSet>> = colorings.iter().collect();
    let missing: Vec<String> = colorings
        .iter()
        .filter(|c| !keys.contains(c))
        .map(|c| format!("{c:?}"))
        .collect();
    let position: BTreeMap<Vertex, usize> =
        rec.h2_vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let outcomes: Vec<Result<Option<bool>>> = rec
        .copies
        .par_iter()
        .map(|copy| {
            if !active.contains(&copy.key) {
                return Ok(Some(true));
            }
            let (sub, lists) = copy_subgraph(g, l, copy);
            let mut partial = BTreeMap::new();
            for &v in &copy.clique {
                let local = copy.vertices.iter().position(|&x| x == v).unwrap();
                partial.insert(local, copy.key[position[&v]].clone());
            }
            match find_bfold(&sub, &lists, b, Some(&partial)) {
                Ok(c) => Ok(Some(c.is_none())),
                Err(e) if e.is_inconclusive() => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut check = finish_check(rec, outcomes, missing)?;
    check.checked = active.len();
    Ok(check)
}

/// Records `h(λ) ≤ t − 1` for a verified witness and returns the bound.
///
/// An obstacle witness additionally needs its gadget section to have passed, since
/// the bound then rests on the whole family of obstacles rather than one graph.
pub fn certify_h_upper(w: &mut Witness) -> Result<(Lambda, usize)> {
    let v = &w.verification;
    let pass = |s: CheckStatus| s == CheckStatus::Pass;
    if !pass(v.assignment) || !pass(v.coloring) || !pass(v.minor) {
        return Err(Error::Precondition(format!(
            "witness is not verified (assignment {:?}, coloring {:?}, minor {:?})",
            v.assignment, v.coloring, v.minor
        )));
    }
    if w.obstacle.is_some() && !pass(v.gadget) {
        return Err(Error::Precondition(
            "obstacle witness needs a passing whole-domain gadget check".into(),
        ));
    }
    if w.t == 0 {
        return Err(Error::invalid("t must be positive"));
    }
    let bound = w.t - 1;
    let entry = HBound {
        lambda: w.lambda.clone(),
        h_at_most: bound,
    };
    if !w.bounds.contains(&entry) {
        w.bounds.push(entry);
    }
    Ok((w.lambda.clone(), bound))
}
