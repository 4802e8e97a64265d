//! Builders and certificate checkers for the four constructions, behind a registry
//! of named [`Construction`]s.

mod steiner_based;
mod thm2;
mod thm3;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::lists::{Color, ColorSet, ListAssignment, ListsFile};
use crate::sdr::{clique_sdr, SdrOutcome};
use crate::steiner::{Rational, SteinerGraph};
use crate::witness::{
    verify_composition, verify_fold_composition, CheckStatus, CompositionCheck, CompositionRecord, Witness,
};

pub use steiner_based::{
    build_ab, build_thmkq, check_epsilon_prime, copy_b_ids, default_steiner, epsilon_prime, AbBundle, ThmkqBundle,
};
pub use thm2::{
    build_thm2, pattern_clique_thm2, thm2_lists, thm2_m, thm2_t1, verify_thm2_certificate, Thm2Gadget,
    Thm2Palette,
};
pub use thm3::{
    boundary_colouring_thm3, build_thm3, complete_d_triples, pattern_clique_thm3, thm3_lists, thm3_m, thm3_t2,
    verify_thm3_certificate, Thm3Gadget, Thm3Palette,
};

/// Default limit on materialised copies for the Steiner-based builders.
pub const DEFAULT_GADGET_COPY_CAP: usize = 100_000;

/// Limit on the ψ domain swept by a gadget section check.
pub const DEFAULT_PSI_CAP: u128 = 1_000_000;

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of injections from a `k`-set into an `n`-set.
pub fn falling(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i))
}

/// One named inequality of a counting certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub holds: bool,
    pub checks: Vec<CertCheck>,
}

impl CertificateReport {
    fn from_checks(checks: Vec<CertCheck>) -> Self {
        CertificateReport {
            holds: checks.iter().all(|c| c.holds),
            checks,
        }
    }

    pub fn violated(&self) -> Vec<&CertCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

fn cert(name: &str, holds: bool, detail: String) -> CertCheck {
    CertCheck {
        name: name.to_string(),
        holds,
        detail,
    }
}

/// Pools left to the `target` vertices once `clique[i]` is coloured `psi[i]`: each
/// target list minus the colours of its clique neighbours, as an SDR problem.
pub fn clique_extension(
    g: &Graph,
    lists: &ListAssignment,
    clique: &[Vertex],
    psi: &[Color],
    target: &[Vertex],
) -> SdrOutcome {
    let pools: Vec<ColorSet> = target
        .iter()
        .map(|&v| {
            let mut l = lists.get(v).clone();
            for (&u, c) in clique.iter().zip(psi) {
                if g.has_edge(u, v) {
                    l.remove(c);
                }
            }
            l
        })
        .collect();
    clique_sdr(&pools)
}

/// Parameters accepted by the constructions; each uses the fields it needs.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub a: Option<usize>,
    pub t: Option<usize>,
    pub n: Option<usize>,
    pub eps: Option<Rational>,
    pub ks: Option<Vec<u32>>,
    pub m: Option<usize>,
    pub cap: Option<usize>,
    pub steiner: Option<SteinerGraph>,
}

impl Params {
    fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
        v.clone()
            .ok_or_else(|| Error::invalid(format!("missing parameter {name}")))
    }
}

/// What a construction produces.
#[derive(Clone, Debug)]
pub enum Artifact {
    /// A single bundle (thm2/thm3: `h1` with the canonical obstacle).
    Witness(Box<Witness>),
    /// A materialised per-copy construction.
    Thmkq(Box<ThmkqBundle>),
    Ab(Box<AbBundle>),
}

pub trait Construction: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn build(&self, p: &Params) -> Result<Artifact>;
}

struct Thm2Construction;
struct Thm3Construction;
struct ThmkqConstruction;
struct AbConstruction;

impl Construction for Thm2Construction {
    fn name(&self) -> &'static str {
        "thm2"
    }
    fn describe(&self) -> &'static str {
        "h1 for λ = {1*(t-2a-6), 3a+6}: A a (2a+5)-clique, B a (t-2)-clique, N_A(v) an (a+3)-subset"
    }
    fn build(&self, p: &Params) -> Result<Artifact> {
        let g = build_thm2(Params::need(&p.a, "a")?, Params::need(&p.t, "t")?)?;
        Ok(Artifact::Witness(Box::new(g.witness(&g.canonical_psi()?)?)))
    }
}

impl Construction for Thm3Construction {
    fn name(&self) -> &'static str {
        "thm3"
    }
    fn describe(&self) -> &'static str {
        "h1 for λ = {1*(t-5a-9), 3*(2a+3)}: A in a+2 triples, B a (t-a-3)-clique, N_A(v) two per triple"
    }
    fn build(&self, p: &Params) -> Result<Artifact> {
        let g = build_thm3(Params::need(&p.a, "a")?, Params::need(&p.t, "t")?)?;
        Ok(Artifact::Witness(Box::new(g.witness(&g.canonical_psi()?)?)))
    }
}

impl Construction for ThmkqConstruction {
    fn name(&self) -> &'static str {
        "thmkq"
    }
    fn describe(&self) -> &'static str {
        "shared clique A plus one copy of B per injection A -> X, lists X∪Y minus non-neighbour colours"
    }
    fn build(&self, p: &Params) -> Result<Artifact> {
        let ks = Params::need(&p.ks, "ks")?;
        let h = match &p.steiner {
            Some(h) => h.clone(),
            None => default_steiner(Params::need(&p.n, "n")?, Params::need(&p.eps, "eps")?)?,
        };
        let cap = p.cap.unwrap_or(DEFAULT_GADGET_COPY_CAP);
        Ok(Artifact::Thmkq(Box::new(build_thmkq(&h, &ks, cap)?)))
    }
}

impl Construction for AbConstruction {
    fn name(&self) -> &'static str {
        "ab"
    }
    fn describe(&self) -> &'static str {
        "shared clique A plus one copy of B per injection A -> m-subsets of [2nm-1], m-fold lists"
    }
    fn build(&self, p: &Params) -> Result<Artifact> {
        let m = Params::need(&p.m, "m")?;
        let h = match &p.steiner {
            Some(h) => h.clone(),
            None => {
                let n = Params::need(&p.n, "n")?;
                let eps = p.eps.unwrap_or_else(|| Rational::new(1, n.max(1) as u64));
                default_steiner(n, eps)?
            }
        };
        let cap = p.cap.unwrap_or(DEFAULT_GADGET_COPY_CAP);
        Ok(Artifact::Ab(Box::new(build_ab(&h, m, cap)?)))
    }
}

pub struct ConstructionRegistry {
    entries: BTreeMap<&'static str, Box<dyn Construction>>,
}

impl Default for ConstructionRegistry {
    fn default() -> Self {
        let mut r = ConstructionRegistry {
            entries: BTreeMap::new(),
        };
        r.register(Box::new(Thm2Construction));
        r.register(Box::new(Thm3Construction));
        r.register(Box::new(ThmkqConstruction));
        r.register(Box::new(AbConstruction));
        r
    }
}

impl ConstructionRegistry {
    pub fn register(&mut self, c: Box<dyn Construction>) {
        self.entries.insert(c.name(), c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Construction> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// Outcome of checking a witness's gadget section.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetCheck {
    pub status: CheckStatus,
    /// Whether the counting certificate for minor-freeness holds, when there is one.
    pub certificate: Option<bool>,
    pub checked: u128,
    pub notes: Vec<String>,
}

#[derive(Deserialize)]
struct SectionHead {
    kind: String,
}

/// Re-derives the gadget from the witness graph and section, then checks the
/// counting certificate and the obstacle for every ψ in the gadget's domain.
pub fn verify_gadget_section(w: &Witness) -> Result<GadgetCheck> {
    let section = w
        .gadget
        .as_ref()
        .ok_or_else(|| Error::invalid("witness has no gadget section"))?;
    let head: SectionHead = serde_json::from_value(section.clone())?;
    match head.kind.as_str() {
        "thm2" => thm2::verify_section(w, section),
        "thm3" => thm3::verify_section(w, section),
        "thmkq" => steiner_based::verify_section(w, section),
        other => Ok(GadgetCheck {
            status: CheckStatus::Inconclusive,
            certificate: None,
            checked: 0,
            notes: vec![format!("unknown gadget kind {other:?}")],
        }),
    }
}

fn section_status(failures: &[String], checked: u128, mut notes: Vec<String>, certificate: Option<bool>) -> GadgetCheck {
    if !failures.is_empty() {
        notes.push(format!("{} of {checked} ψ fail: first {}", failures.len(), failures[0]));
    }
    GadgetCheck {
        status: if failures.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        certificate,
        checked,
        notes,
    }
}

/// Files of a per-copy directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub fold: usize,
    pub params: serde_json::Value,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, v: &T) -> Result<()> {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T> {
    let text = std::fs::read_to_string(dir.join(name))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `graph.json`, `lists.json`, `copies.json`, `steiner.json`, `manifest.json`
/// and, for λ-constructions, `witness.json`.
pub fn write_percopy_dir(dir: &Path, art: &Artifact) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    match art {
        Artifact::Witness(w) => write_json(dir, "witness.json", w.as_ref()),
        Artifact::Thmkq(b) => {
            write_json(dir, "graph.json", &b.witness.graph)?;
            write_json(
                dir,
                "lists.json",
                &ListsFile {
                    classes: b.witness.classes.clone(),
                    lists: b.witness.lists.clone(),
                },
            )?;
            write_json(dir, "copies.json", b.witness.composition.as_ref().expect("thmkq record"))?;
            write_json(dir, "steiner.json", &b.steiner)?;
            write_json(dir, "witness.json", &b.witness)?;
            write_json(
                dir,
                "manifest.json",
                &Manifest {
                    kind: "thmkq".into(),
                    fold: 1,
                    params: b.params.clone(),
                },
            )
        }
        Artifact::Ab(b) => {
            write_json(dir, "graph.json", &b.graph)?;
            write_json(
                dir,
                "lists.json",
                &ListsFile {
                    classes: Default::default(),
                    lists: b.lists.clone(),
                },
            )?;
            write_json(dir, "copies.json", &b.record)?;
            write_json(dir, "steiner.json", &b.steiner)?;
            write_json(
                dir,
                "manifest.json",
                &Manifest {
                    kind: "ab".into(),
                    fold: b.m,
                    params: b.params.clone(),
                },
            )
        }
    }
}

/// Result of `verify percopy`.
#[derive(Clone, Debug, Serialize)]
pub struct PerCopyReport {
    pub kind: String,
    pub fold: usize,
    pub check: CompositionCheck,
    pub universe: usize,
    pub min_list: usize,
    pub max_list: usize,
}

/// Re-checks a per-copy directory written by [`write_percopy_dir`].
pub fn verify_percopy_dir(dir: &Path) -> Result<PerCopyReport> {
    let manifest: Manifest = read_json(dir, "manifest.json")?;
    let graph: Graph = read_json(dir, "graph.json")?;
    let lists: ListsFile = read_json(dir, "lists.json")?;
    lists.lists.check_carrier(&graph)?;
    let check = if manifest.fold == 1 {
        let rec: CompositionRecord = read_json(dir, "copies.json")?;
        verify_composition(&graph, &lists.lists, &rec, crate::witness::DEFAULT_ENUMERATION_CAP)?
    } else {
        let rec: CompositionRecord<Vec<ColorSet>> = read_json(dir, "copies.json")?;
        verify_fold_composition(
            &graph,
            &lists.lists,
            manifest.fold,
            &rec,
            crate::witness::DEFAULT_ENUMERATION_CAP,
        )?
    };
    let sizes: Vec<usize> = lists.lists.lists.iter().map(BTreeSet::len).collect();
    Ok(PerCopyReport {
        kind: manifest.kind,
        fold: manifest.fold,
        check,
        universe: lists.lists.universe().len(),
        min_list: sizes.iter().copied().min().unwrap_or(0),
        max_list: sizes.iter().copied().max().unwrap_or(0),
    })
}

fn section_json<T: Serialize>(kind: &str, body: T) -> serde_json::Value {
    let mut v = serde_json::to_value(body).expect("section serializes");
    v.as_object_mut()
        .expect("section is an object")
        .insert("kind".into(), json!(kind));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_helpers() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(binomial(7, 2), 21);
        assert_eq!(falling(5, 4), 120);
        assert_eq!(falling(21, 2), 420);
        assert_eq!(falling(3, 4), 0);
    }

    #[test]
    fn registry_knows_the_four_constructions() {
        let r = ConstructionRegistry::default();
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["ab", "thm2", "thm3", "thmkq"]);
        assert!(r.get("thm4").is_none());
    }

    #[test]
    fn missing_parameter_is_invalid() {
        let r = ConstructionRegistry::default();
        let err = r.get("thm2").unwrap().build(&Params::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
