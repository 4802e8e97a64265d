//! The ten acceptance criteria, each printed as one PASS/FAIL line with its runtime.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lchoose::choosability::{lambda_choosable_small, ChoosabilityVerdict, DEFAULT_ASSIGNMENT_BUDGET};
use lchoose::coloring::find_coloring;
use lchoose::gadgets::{
    boundary_colouring_thm3, build_ab, build_thm2, build_thm3, build_thmkq, complete_d_triples, default_steiner,
    pattern_clique_thm2, pattern_clique_thm3, verify_thm2_certificate, verify_thm3_certificate,
    DEFAULT_GADGET_COPY_CAP,
};
use lchoose::graph::{is_clique, Graph, Vertex};
use lchoose::lambda::partitions;
use lchoose::lists::{Color, ColorSet, ColourClasses, ListAssignment};
use lchoose::minor::{find_kt_minor, find_kt_minor_with, verify_minor_model, MinorRegistry, DEFAULT_BUDGET};
use lchoose::obstacle::{compose, FnResponder, ObstacleFamily, DEFAULT_COPY_CAP};
use lchoose::sdr::SdrOutcome;
use lchoose::steiner::{cyclic_steiner, verify_steiner, Rational};
use lchoose::witness::CheckStatus;
use lchoose::{leq_order, parse_lambda, Lambda};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_minor_oracle() -> Outcome {
    let mut checked = 0usize;
    let mut compare = |g: &Graph| -> Result<(), String> {
        for t in 1..=5 {
            let fast = find_kt_minor(g, t, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let slow = common::naive_has_kt_minor(g, t);
            if let Some(m) = &fast {
                ensure(verify_minor_model(g, m), || format!("invalid model on {:?}", g.edges()))?;
            }
            ensure(fast.is_some() == slow, || {
                format!("t={t} disagrees on {:?}: search {}, oracle {slow}", g.edges(), fast.is_some())
            })?;
            checked += 1;
        }
        Ok(())
    };
    for n in 1..=5 {
        for g in common::all_graphs(n) {
            compare(&g)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [6, 7] {
        for _ in 0..500 {
            let p: f64 = rng.gen_range(0.2..0.9);
            compare(&common::random_graph(n, p, &mut rng))?;
        }
    }
    Ok(format!("{checked} (graph, t) pairs agree with the naive enumerator"))
}

fn c2_thm2_exact() -> Outcome {
    let g = build_thm2(0, 52).map_err(|e| e.to_string())?;
    let reg = MinorRegistry::default();
    let low = reg.get("low-deficiency").unwrap();
    ensure(g.graph.n() == 55, || format!("{} vertices", g.graph.n()))?;
    let found = find_kt_minor_with(low, &g.graph, 52, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || "K_52 minor found".into())?;
    let cert = verify_thm2_certificate(&g);
    ensure(cert.holds, || format!("certificate violated: {:?}", cert.violated()))?;
    let chain = &cert.checks.last().unwrap().detail;
    ensure(chain == "50 < 51", || format!("chain value {chain}"))?;
    Ok(format!("55 vertices, no K_52 minor, certificate {chain}"))
}

fn c3_thm2_extension() -> Outcome {
    let g = build_thm2(0, 52).map_err(|e| e.to_string())?;
    let pal = g.palette().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mut a = pal.a.clone();
        a.shuffle(&mut rng);
        let psi: Vec<Color> = a[..g.a_set.len()].to_vec();
        match g.extension(&psi).map_err(|e| e.to_string())? {
            SdrOutcome::HallViolator { lists, colors } => {
                ensure(lists.len() == 50 && colors.len() == 49, || {
                    format!("violator {} lists over {} colours for {psi:?}", lists.len(), colors.len())
                })?;
            }
            SdrOutcome::Found { .. } => return Err(format!("ψ = {psi:?} extends")),
        }
    }
    Ok("50 random ψ: Hall violator of 50 lists over a 49-colour pool".into())
}

fn c4_thm3_exact() -> Outcome {
    let g = build_thm3(0, 48).map_err(|e| e.to_string())?;
    ensure(g.graph.n() == 51, || format!("{} vertices", g.graph.n()))?;
    let found = find_kt_minor(&g.graph, 48, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || "K_48 minor found".into())?;
    let cert = verify_thm3_certificate(&g);
    ensure(cert.holds, || format!("certificate violated: {:?}", cert.violated()))?;
    for psi in g.all_psi().map_err(|e| e.to_string())? {
        let pool = g.extension_pool(&psi).map_err(|e| e.to_string())?;
        ensure(pool == 44, || format!("pool {pool} for {psi:?}"))?;
        match g.extension(&psi).map_err(|e| e.to_string())? {
            SdrOutcome::HallViolator { lists, colors } => {
                ensure(lists.len() == 45 && colors.len() == 44, || {
                    format!("violator {} over {}", lists.len(), colors.len())
                })?
            }
            SdrOutcome::Found { .. } => return Err(format!("ψ = {psi:?} extends")),
        }
    }
    Ok("51 vertices, no K_48 minor, certificate holds, pool 44 < 45 for every ψ".into())
}

fn random_injection(palette: &[Color], n: usize, rng: &mut ChaCha8Rng) -> Vec<Color> {
    let mut p = palette.to_vec();
    p.shuffle(rng);
    p.truncate(n);
    p
}

fn c5_selectors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g2 = build_thm2(0, 52).map_err(|e| e.to_string())?;
    let pal2 = g2.palette().map_err(|e| e.to_string())?;
    let colours2: Vec<Color> = pal2.b.iter().chain(&pal2.a).copied().collect();
    for _ in 0..100 {
        let psi = random_injection(&colours2, 51, &mut rng);
        let sel = pattern_clique_thm2(&psi, &pal2, 0).ok_or("thm2 selector failed")?;
        ensure(sel.len() >= 5 && sel.iter().all(|&v| pal2.a.contains(&psi[v])), || {
            format!("bad thm2 selection {sel:?}")
        })?;
        ensure(is_clique(&Graph::complete(51), &sel).unwrap_or(false), || "not a clique".into())?;
    }
    let g3 = build_thm3(0, 48).map_err(|e| e.to_string())?;
    let pal3 = g3.palette().map_err(|e| e.to_string())?;
    let d: ColorSet = pal3.d_colours();
    let colours3: Vec<Color> = pal3.b.iter().copied().chain(d.iter().copied()).collect();
    for _ in 0..100 {
        let psi = random_injection(&colours3, 47, &mut rng);
        let sel = pattern_clique_thm3(&psi, &pal3, 0).ok_or("thm3 selector failed")?;
        ensure(sel.len() == 6, || format!("selection of {}", sel.len()))?;
        for tri in sel.chunks(3) {
            let cols: Vec<Color> = tri.iter().map(|&v| psi[v]).collect();
            ensure(pal3.d.iter().any(|g| g[..] == cols[..]), || format!("triple {cols:?}"))?;
        }
    }
    for a in 0..3 {
        let g = build_thm3(a, 5 * a + 9).map_err(|e| e.to_string())?;
        let pal = g.palette().map_err(|e| e.to_string())?;
        let psi = boundary_colouring_thm3(&pal, a);
        ensure(psi.len() == 5 * a + 7 && complete_d_triples(&psi, &pal).len() == a + 1, || {
            format!("boundary colouring for a={a}")
        })?;
        ensure(pattern_clique_thm3(&psi, &pal, a).is_none(), || {
            format!("selector succeeded on the boundary colouring for a={a}")
        })?;
    }
    Ok("thm2 100/100 on K_51, thm3 100/100 on K_47, boundary 5a+7 defeats the selector (a=0,1,2)".into())
}

fn set(xs: &[Color]) -> ColorSet {
    xs.iter().copied().collect()
}

fn c6_composition() -> Outcome {
    // K_3 with clique {0}, one class {1,2,3} of quota 2; the private vertices both get
    // {c, z} for the clique colour c and z the largest other colour
    let fam = ObstacleFamily::new(
        Graph::complete(3),
        vec![0],
        parse_lambda("2").unwrap(),
        ColourClasses::new(vec![set(&[1, 2, 3])]),
        Box::new(FnResponder(|psi: &[Color]| {
            let c = psi[0];
            let z = (1..=3).rev().find(|&x| x != c).unwrap();
            Ok(ListAssignment::uniform(3, &set(&[c, z])))
        })),
    )
    .map_err(|e| e.to_string())?;
    let h2 = Graph::complete(2);
    let l2 = ListAssignment::uniform(2, &set(&[1, 2]));
    let comp = compose(&fam, &h2, &l2, &|_| Some(vec![0]), DEFAULT_COPY_CAP).map_err(|e| e.to_string())?;
    ensure(comp.graph.n() <= 12, || format!("{} vertices", comp.graph.n()))?;
    ensure(find_coloring(&comp.graph, &comp.lists, None).map_err(|e| e.to_string())?.is_none(), || {
        "composition is colourable".into()
    })?;
    for i in 0..comp.record.copies.len() {
        let (g, l, ids) = comp.without_copy(i);
        let key = &comp.record.copies[i].key;
        let partial: BTreeMap<Vertex, Color> = (0..h2.n())
            .map(|v| (ids.iter().position(|&x| x == v).unwrap(), key[v]))
            .collect();
        ensure(find_coloring(&g, &l, Some(&partial)).map_err(|e| e.to_string())?.is_some(), || {
            format!("deleting copy {i} leaves {key:?} blocked")
        })?;
    }
    Ok(format!(
        "{} vertices, {} copies, not colourable, each deletion restores its ψ",
        comp.graph.n(),
        comp.record.copies.len()
    ))
}

fn c7_thmkq_toy() -> Outcome {
    let h = default_steiner(4, Rational::new(1, 2)).map_err(|e| e.to_string())?;
    let b = build_thmkq(&h, &[5], DEFAULT_GADGET_COPY_CAP).map_err(|e| e.to_string())?;
    ensure(b.copies().len() == 120, || format!("{} copies", b.copies().len()))?;
    let universe = b.witness.lists.universe().len();
    ensure(universe == 7, || format!("universe {universe}"))?;
    for i in 0..120 {
        match b.copy_extension(i) {
            SdrOutcome::HallViolator { colors, .. } => {
                ensure(colors.len() == 3, || format!("copy {i} pool {}", colors.len()))?
            }
            SdrOutcome::Found { .. } => return Err(format!("copy {i} extends")),
        }
    }
    Ok("120/120 injections blocked, universe 7 = 2n-1".into())
}

fn c8_ab_toy() -> Outcome {
    let h = default_steiner(2, Rational::new(1, 2)).map_err(|e| e.to_string())?;
    let b = build_ab(&h, 2, DEFAULT_GADGET_COPY_CAP).map_err(|e| e.to_string())?;
    ensure(b.lists.universe() == (1..=7).collect::<ColorSet>(), || "universe is not [7]".into())?;
    // disjoint-image injections, computed independently from the 21 two-subsets
    let d: Vec<ColorSet> = (1..=7u32)
        .flat_map(|x| (x + 1..=7).map(move |y| set(&[x, y])))
        .collect();
    let expected: BTreeSet<Vec<ColorSet>> = d
        .iter()
        .flat_map(|x| d.iter().filter(|y| x.is_disjoint(y)).map(move |y| vec![x.clone(), y.clone()]))
        .collect();
    ensure(d.len() == 21 && expected.len() == 210, || format!("{} active", expected.len()))?;
    let active = b.active();
    let keys: BTreeSet<Vec<ColorSet>> = active.iter().map(|&i| b.record.copies[i].key.clone()).collect();
    ensure(keys == expected, || "active copies differ from the disjoint injections".into())?;
    for &i in &active {
        ensure(b.copy_extension(i).map_err(|e| e.to_string())?.is_none(), || {
            format!("copy {i} admits a 2-fold extension")
        })?;
    }
    let sizes: BTreeSet<usize> = (2..b.graph.n()).map(|v| b.lists.get(v).len()).collect();
    ensure(sizes == BTreeSet::from([5]), || format!("list sizes {sizes:?}"))?;
    Ok("210/210 disjoint injections fail 2-fold extension, all lists of size 5".into())
}

fn c9_order_and_monotonicity() -> Outcome {
    let ones = |k: usize| Lambda::from_runs(&[(1, k)]).unwrap();
    for k in 1..=8u32 {
        let single = Lambda::new(vec![k]).unwrap();
        ensure(leq_order(&single, &ones(k as usize)), || format!("{{{k}}} <= {{1*{k}}} fails"))?;
    }
    let target = parse_lambda("1*4,2").unwrap();
    for p in partitions(6) {
        if p != ones(6) {
            ensure(leq_order(&p, &target), || format!("{p} <= 1*4,2 fails"))?;
        }
    }
    let all: Vec<Lambda> = (1..=8).flat_map(partitions).collect();
    for x in &all {
        ensure(leq_order(x, x), || format!("{x} not reflexive"))?;
        for y in &all {
            if !leq_order(x, y) {
                continue;
            }
            for z in &all {
                if leq_order(y, z) {
                    ensure(leq_order(x, z), || format!("{x} <= {y} <= {z} but not {x} <= {z}"))?;
                }
            }
        }
    }
    let small: Vec<Lambda> = (1..=4).flat_map(partitions).collect();
    let mut witnesses = 0;
    for n in 1..=5 {
        for g in common::nonisomorphic_graphs(n) {
            let mut verdict: BTreeMap<String, bool> = BTreeMap::new();
            for lam in &small {
                let v = lambda_choosable_small(&g, lam, None, DEFAULT_ASSIGNMENT_BUDGET).map_err(|e| e.to_string())?;
                let not_choosable = match v {
                    ChoosabilityVerdict::Choosable { .. } => false,
                    ChoosabilityVerdict::Witness { .. } => true,
                    ChoosabilityVerdict::CapExceeded { .. } => {
                        return Err(format!("cap exceeded for {lam} on {:?}", g.edges()))
                    }
                };
                verdict.insert(lam.to_string(), not_choosable);
            }
            for hi in &small {
                if !verdict[&hi.to_string()] {
                    continue;
                }
                witnesses += 1;
                for lo in &small {
                    if leq_order(lo, hi) {
                        ensure(verdict[&lo.to_string()], || {
                            format!("{:?} is {lo}-choosable but not {hi}-choosable", g.edges())
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} partitions ordered consistently, monotonicity holds on {witnesses} witnesses",
        all.len()
    ))
}

fn c10_steiner() -> Outcome {
    let r = Rational::new;
    // matching-deleted join: K_6 minus a perfect cross matching is the octahedron
    let matching = cyclic_steiner(3, 1, r(1, 3)).map_err(|e| e.to_string())?;
    let rep = verify_steiner(&matching.graph, &matching.a, &matching.b, 3, r(1, 3), DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure(rep.all_pass() && rep.t == 5, || format!("matching-deleted join: {rep:?}"))?;
    let complete = cyclic_steiner(3, 0, r(1, 3)).map_err(|e| e.to_string())?;
    let rep = verify_steiner(&complete.graph, &complete.a, &complete.b, 3, r(1, 3), DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure(rep.minor == CheckStatus::Fail && !rep.all_pass(), || format!("complete join: {rep:?}"))?;
    let cyclic = cyclic_steiner(6, 2, r(1, 3)).map_err(|e| e.to_string())?;
    let rep = verify_steiner(&cyclic.graph, &cyclic.a, &cyclic.b, 6, r(1, 3), DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure(rep.all_pass() && rep.t == 10, || format!("cyclic: {rep:?}"))?;
    Ok("matching-deleted join passes, complete join fails, cyclic n=6 has no K_10 minor".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("1 minor-search oracle equivalence", c1_minor_oracle, 300),
        ("2 thm2 a=0 t=52 exact", c2_thm2_exact, 600),
        ("3 thm2 extension failure", c3_thm2_extension, 60),
        ("4 thm3 a=0 t=48 exact", c4_thm3_exact, 600),
        ("5 pattern selectors", c5_selectors, 60),
        ("6 composition toy", c6_composition, 60),
        ("7 thmkq toy", c7_thmkq_toy, 60),
        ("8 (a,b) toy", c8_ab_toy, 60),
        ("9 order and monotonicity", c9_order_and_monotonicity, 600),
        ("10 Steiner verifier", c10_steiner, 300),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if outcome.is_ok() && took > Duration::from_secs(limit) {
            outcome = Err(format!("took {took:.1?}, limit {limit}s"));
        }
        match outcome {
            Ok(msg) => println!("PASS  criterion {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg} ({took:.2?})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
