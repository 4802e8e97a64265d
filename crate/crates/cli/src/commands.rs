use std::collections::BTreeMap;
use std::path::Path;

use itertools::Itertools;
use serde::de::DeserializeOwned;
use serde_json::json;

use lchoose::choosability::{lambda_choosable_small, ChoosabilityVerdict, DEFAULT_ASSIGNMENT_BUDGET};
use lchoose::coloring::{find_bfold, find_coloring};
use lchoose::gadgets::{verify_percopy_dir, write_percopy_dir, Artifact, ConstructionRegistry, Params};
use lchoose::graph::is_clique;
use lchoose::lists::{is_valid_assignment, ColorSet, ListsFile};
use lchoose::minor::{find_kt_minor_with, MinorRegistry, DEFAULT_BUDGET};
use lchoose::obstacle::{check_obstacle, compose, FamilyFile, ObstacleFamily, DEFAULT_COPY_CAP};
use lchoose::steiner::{parse_ratio, sample_steiner, verify_steiner, Rational, SteinerGraph};
use lchoose::witness::{certify_h_upper, verify_witness, CheckStatus, MinorMode, Overall, Witness};
use lchoose::{leq_order, parse_lambda, Color, Error, Graph, Result, Vertex};

use crate::report::{Outcome, Verdict};
use crate::{BuildCmd, CheckCmd, Command, ComposeArgs, MinorArgs, SteinerCmd, VerifyCmd};

pub fn run(cmd: Command) -> (&'static str, Result<Outcome>) {
    match cmd {
        Command::Build(b) => ("build", build(b)),
        Command::Verify(VerifyCmd::Witness { file, minor, out }) => {
            ("verify witness", verify_witness_file(&file, &minor, out.as_deref()))
        }
        Command::Verify(VerifyCmd::Percopy { dir }) => ("verify percopy", verify_percopy(&dir)),
        Command::Check(c) => ("check", check(c)),
        Command::Minor(m) => ("minor", minor(m)),
        Command::Order { lhs, rhs } => ("order", order(&lhs, &rhs)),
        Command::Steiner(s) => ("steiner", steiner(s)),
        Command::Compose(c) => ("compose", compose_cmd(c)),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// JSON graph, or DIMACS for `.col` / `.dimacs` files.
fn read_graph(path: &Path) -> Result<Graph> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("col" | "dimacs") => Graph::from_dimacs(&text),
        _ => Graph::from_json(&text),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn ratio(num: u64, den: u64) -> Result<Rational> {
    if den == 0 {
        return Err(Error::invalid("eps denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

fn build(cmd: BuildCmd) -> Result<Outcome> {
    let registry = ConstructionRegistry::default();
    let (kind, params, out, inputs) = match cmd {
        BuildCmd::Thm2 { a, t, out } => (
            "thm2",
            Params { a: Some(a), t: Some(t), ..Params::default() },
            out,
            json!({"kind": "thm2", "a": a, "t": t}),
        ),
        BuildCmd::Thm3 { a, t, out } => (
            "thm3",
            Params { a: Some(a), t: Some(t), ..Params::default() },
            out,
            json!({"kind": "thm3", "a": a, "t": t}),
        ),
        BuildCmd::Thmkq { n, eps_num, eps_den, q, ks, steiner, cap, out } => {
            if ks.len() != q {
                return Err(Error::invalid(format!("--q {q} but {} values in --ks", ks.len())));
            }
            let steiner = steiner.as_deref().map(read_json::<SteinerGraph>).transpose()?;
            (
                "thmkq",
                Params {
                    n: Some(n),
                    eps: Some(ratio(eps_num, eps_den)?),
                    ks: Some(ks.clone()),
                    cap,
                    steiner,
                    ..Params::default()
                },
                out,
                json!({"kind": "thmkq", "n": n, "eps": format!("{eps_num}/{eps_den}"), "q": q, "ks": ks}),
            )
        }
        BuildCmd::Ab { n, m, eps_num, eps_den, steiner, cap, out } => {
            let eps = match (eps_num, eps_den) {
                (Some(p), Some(q)) => Some(ratio(p, q)?),
                _ => None,
            };
            let steiner = steiner.as_deref().map(read_json::<SteinerGraph>).transpose()?;
            (
                "ab",
                Params { n: Some(n), m: Some(m), eps, cap, steiner, ..Params::default() },
                out,
                json!({"kind": "ab", "n": n, "m": m, "eps": eps.map(|e| e.to_string())}),
            )
        }
    };
    let construction = registry
        .get(kind)
        .ok_or_else(|| Error::invalid(format!("unknown construction {kind}")))?;
    let artifact = construction.build(&params)?;
    let details = match &artifact {
        Artifact::Witness(w) => {
            write_text(&out, &w.to_json())?;
            json!({
                "out": out, "vertices": w.graph.n(), "edges": w.graph.edge_count(),
                "lambda": w.lambda, "t": w.t,
            })
        }
        Artifact::Thmkq(b) => {
            write_percopy_dir(&out, &artifact)?;
            json!({"out": out, "vertices": b.witness.graph.n(), "params": b.params})
        }
        Artifact::Ab(b) => {
            write_percopy_dir(&out, &artifact)?;
            json!({"out": out, "vertices": b.graph.n(), "params": b.params})
        }
    };
    Ok(Outcome {
        inputs,
        verdict: Verdict::Pass,
        summary: format!("built {kind} into {}", out.display()),
        details,
    })
}

fn verify_witness_file(file: &Path, minor: &str, out: Option<&Path>) -> Result<Outcome> {
    let mode: MinorMode = minor.parse()?;
    let mut w = Witness::from_json(&read_text(file)?)?;
    let report = verify_witness(&mut w, mode)?;
    let verdict = match report.overall {
        Overall::Verified => Verdict::Pass,
        Overall::Failed => Verdict::Fail,
        Overall::PartiallyVerified | Overall::Inconclusive => Verdict::Inconclusive,
    };
    let bound = if verdict == Verdict::Pass {
        certify_h_upper(&mut w).ok().map(|(lam, h)| json!({"lambda": lam, "h_at_most": h}))
    } else {
        None
    };
    if let Some(path) = out {
        write_text(path, &w.to_json())?;
    }
    let summary = match &bound {
        Some(_) => format!("verified: h({}) <= {}", w.lambda, w.t - 1),
        None => format!("{:?}", report.overall).to_lowercase(),
    };
    Ok(Outcome {
        inputs: json!({"file": file, "minor": minor}),
        verdict,
        summary,
        details: json!({"report": report, "bound": bound}),
    })
}

fn verify_percopy(dir: &Path) -> Result<Outcome> {
    let report = verify_percopy_dir(dir)?;
    let verdict = match report.check.status {
        CheckStatus::Pass => Verdict::Pass,
        CheckStatus::Fail => Verdict::Fail,
        _ => Verdict::Inconclusive,
    };
    Ok(Outcome {
        inputs: json!({"dir": dir}),
        verdict,
        summary: format!(
            "{}: {} copies checked, status {:?}",
            report.kind, report.check.checked, report.check.status
        ),
        details: serde_json::to_value(&report)?,
    })
}

fn check(cmd: CheckCmd) -> Result<Outcome> {
    match cmd {
        CheckCmd::Color { graph, lists, b, partial } => {
            let g = read_graph(&graph)?;
            let l: ListsFile = read_json(&lists)?;
            let inputs = json!({"graph": graph, "lists": lists, "b": b, "partial": partial});
            let found = if b == 1 {
                let partial = partial
                    .as_deref()
                    .map(read_json::<BTreeMap<Vertex, Color>>)
                    .transpose()?;
                find_coloring(&g, &l.lists, partial.as_ref())?.map(|c| json!(c))
            } else {
                let partial = partial
                    .as_deref()
                    .map(read_json::<BTreeMap<Vertex, ColorSet>>)
                    .transpose()?;
                find_bfold(&g, &l.lists, b, partial.as_ref())?.map(|c| json!(c.assignment))
            };
            Ok(Outcome {
                inputs,
                verdict: Verdict::holds(found.is_some()),
                summary: if found.is_some() { "coloring found" } else { "no coloring" }.into(),
                details: json!({"coloring": found}),
            })
        }
        CheckCmd::Assignment { graph, lists, lambda } => {
            let g = read_graph(&graph)?;
            let l: ListsFile = read_json(&lists)?;
            let lam = parse_lambda(&lambda)?;
            let result = is_valid_assignment(&g, &l.lists, &lam, &l.classes)?;
            Ok(Outcome {
                inputs: json!({"graph": graph, "lists": lists, "lambda": lambda}),
                verdict: Verdict::holds(result.is_ok()),
                summary: match &result {
                    Ok(()) => format!("valid {lam}-list assignment"),
                    Err(v) => format!("not a {lam}-list assignment: {v}"),
                },
                details: json!({"violation": result.err()}),
            })
        }
        CheckCmd::Choosable { graph, lambda, budget } => {
            let g = read_graph(&graph)?;
            let lam = parse_lambda(&lambda)?;
            let v = lambda_choosable_small(&g, &lam, None, budget.unwrap_or(DEFAULT_ASSIGNMENT_BUDGET))?;
            let verdict = match &v {
                ChoosabilityVerdict::Choosable { .. } => Verdict::Pass,
                ChoosabilityVerdict::Witness { .. } => Verdict::Fail,
                ChoosabilityVerdict::CapExceeded { .. } => Verdict::Inconclusive,
            };
            Ok(Outcome {
                inputs: json!({"graph": graph, "lambda": lambda}),
                verdict,
                summary: match verdict {
                    Verdict::Pass => format!("{lam}-choosable"),
                    Verdict::Fail => format!("not {lam}-choosable"),
                    Verdict::Inconclusive => "assignment budget exceeded".into(),
                },
                details: serde_json::to_value(&v)?,
            })
        }
    }
}

fn minor(m: MinorArgs) -> Result<Outcome> {
    let g = read_graph(&m.graph)?;
    let registry = MinorRegistry::default();
    let strategy = registry.get(&m.strategy).ok_or_else(|| {
        Error::invalid(format!(
            "unknown strategy {:?}; known: {}",
            m.strategy,
            registry.names().join(", ")
        ))
    })?;
    let found = find_kt_minor_with(strategy, &g, m.t, m.budget.unwrap_or(DEFAULT_BUDGET))?;
    let t = m.t;
    Ok(Outcome {
        inputs: json!({"graph": m.graph, "t": t, "strategy": m.strategy}),
        verdict: Verdict::holds(found.is_none()),
        summary: match &found {
            None => format!("no K_{t} minor"),
            Some(_) => format!("K_{t} minor found"),
        },
        details: json!({"vertices": g.n(), "model": found}),
    })
}

fn order(lhs: &str, rhs: &str) -> Result<Outcome> {
    let (l, r) = (parse_lambda(lhs)?, parse_lambda(rhs)?);
    let holds = leq_order(&l, &r);
    Ok(Outcome {
        inputs: json!({"lhs": lhs, "rhs": rhs}),
        verdict: Verdict::holds(holds),
        summary: format!("{l} {} {r}", if holds { "<=" } else { "is not <=" }),
        details: json!({"lhs": l, "rhs": r, "leq": holds}),
    })
}

fn steiner(cmd: SteinerCmd) -> Result<Outcome> {
    match cmd {
        SteinerCmd::Sample { n, eps, seed, budget, minor_budget, out } => {
            let e = parse_ratio(&eps)?;
            let found = sample_steiner(n, e, seed, budget, minor_budget.unwrap_or(DEFAULT_BUDGET))?;
            let inputs = json!({"n": n, "eps": eps, "seed": seed, "budget": budget});
            match found {
                Some((h, attempt)) => {
                    if let Some(path) = &out {
                        write_text(path, &serde_json::to_string_pretty(&h)?)?;
                    }
                    Ok(Outcome {
                        inputs,
                        verdict: Verdict::Pass,
                        summary: format!("attempt {attempt} verified (no K_{} minor)", h.verified_t.unwrap_or(0)),
                        details: json!({"attempt": attempt, "out": out, "steiner": h}),
                    })
                }
                None => Ok(Outcome {
                    inputs,
                    verdict: Verdict::Inconclusive,
                    summary: format!("no instance verified in {budget} attempts"),
                    details: json!({"attempts": budget}),
                }),
            }
        }
        SteinerCmd::Verify { file, budget } => {
            let h: SteinerGraph = read_json(&file)?;
            let rep = verify_steiner(&h.graph, &h.a, &h.b, h.n, h.eps, budget.unwrap_or(DEFAULT_BUDGET))?;
            let verdict = if rep.all_pass() {
                Verdict::Pass
            } else if [rep.cliques, rep.non_neighbors, rep.minor].contains(&CheckStatus::Fail) {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            Ok(Outcome {
                inputs: json!({"file": file}),
                verdict,
                summary: format!(
                    "cliques {:?}, non-neighbours {:?}, no K_{} minor {:?}",
                    rep.cliques, rep.non_neighbors, rep.t, rep.minor
                ),
                details: serde_json::to_value(&rep)?,
            })
        }
    }
}

/// The first ordered `p`-clique of `h2` (subsets lexicographic, then orderings) whose
/// colouring the family blocks.
fn first_blocked_clique(fam: &ObstacleFamily, h2: &Graph, psi: &[Color]) -> Option<Vec<Vertex>> {
    (0..h2.n())
        .combinations(fam.p())
        .filter(|s| is_clique(h2, s).unwrap_or(false))
        .flat_map(|s| s.into_iter().permutations(fam.p()))
        .find(|s| {
            let key: Vec<Color> = s.iter().map(|&v| psi[v]).collect();
            check_obstacle(fam, &key).unwrap_or(false)
        })
}

fn compose_cmd(c: ComposeArgs) -> Result<Outcome> {
    let fam = ObstacleFamily::from_file(read_json::<FamilyFile>(&c.family)?)?;
    let h2 = read_graph(&c.h2)?;
    let l2: ListsFile = read_json(&c.lists)?;
    let select = |psi: &[Color]| first_blocked_clique(&fam, &h2, psi);
    let comp = compose(&fam, &h2, &l2.lists, &select, DEFAULT_COPY_CAP)?;
    let t = c.t.unwrap_or(comp.graph.n() + 1);
    let w = Witness::new(
        comp.graph.clone(),
        fam.lam.clone(),
        fam.classes.clone(),
        comp.lists.clone(),
        t,
        format!("compose({})", c.family.display()),
    )
    .with_composition(comp.record.clone());
    write_text(&c.out, &w.to_json())?;
    Ok(Outcome {
        inputs: json!({"family": c.family, "h2": c.h2, "lists": c.lists, "t": c.t}),
        verdict: Verdict::holds(comp.warning.is_none()),
        summary: match &comp.warning {
            None => format!(
                "{} copies glued, {} vertices",
                comp.record.copies.len(),
                comp.graph.n()
            ),
            Some(msg) => msg.clone(),
        },
        details: json!({
            "out": c.out, "vertices": comp.graph.n(), "copies": comp.record.copies.len(),
            "warning": comp.warning,
        }),
    })
}
