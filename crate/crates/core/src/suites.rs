//! Per-lemma verification suites: each draws one hypothesis-satisfying
//! instance from its rejection sampler and evaluates the conclusion,
//! returning a replayable counterexample on failure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::json;

use crate::assemblage::{branch_at, encoding_at, find_simulation_with_deadline};
use crate::corpus::*;
use crate::decomp::{metrics, validate};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::paths::{disjoint_linkage, max_disjoint_paths, PathSystem};
use crate::realize::{decoration_from_decomposition, is_n_unimpeded};
use crate::refine::{
    compare_signatures, find_unintegrated_violation, find_unlinked_violation, improve_unintegrated,
    improve_unlinked, is_incorporated, shift_separation, signature, verify_shifted,
};
use crate::separation::enumerate_separations;
use crate::strips::{classify_static, foundation_paths, progress_shift, restrict_system};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Lemma41,
    Lemma33,
    Lemma43,
    Lemma44,
    Lemma62,
    Claim3,
    Claim4,
    Menger,
    EmbedOracle,
}

impl SuiteName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma41" => SuiteName::Lemma41,
            "lemma33" => SuiteName::Lemma33,
            "lemma43" => SuiteName::Lemma43,
            "lemma44" => SuiteName::Lemma44,
            "lemma62" => SuiteName::Lemma62,
            "claim3" => SuiteName::Claim3,
            "claim4" => SuiteName::Claim4,
            "menger" => SuiteName::Menger,
            "embed-oracle" => SuiteName::EmbedOracle,
            other => return Err(Error::Precondition(format!("unknown suite `{other}`"))),
        })
    }

    pub fn all() -> &'static [&'static str] {
        &[
            "lemma41",
            "lemma33",
            "lemma43",
            "lemma44",
            "lemma62",
            "claim3",
            "claim4",
            "menger",
            "embed-oracle",
        ]
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Pass,
    Fail(serde_json::Value),
    Undecided,
}

/// Runs the `index`-th instance of a suite under the given seed. Rejection
/// sampling advances an internal stream until a hypothesis-satisfying
/// instance appears; the instance index is deterministic in (seed, index).
pub fn run_instance(
    name: SuiteName,
    seed: u64,
    index: u64,
    deadline: Option<Instant>,
) -> Result<Outcome> {
    let mut attempt = 0u64;
    loop {
        if attempt > 20_000 {
            return Err(Error::SearchCap(format!(
                "no hypothesis-satisfying instance within the attempt budget (suite index {index})"
            )));
        }
        let stream = index * 32_768 + attempt;
        attempt += 1;
        let outcome = try_instance(name, seed, stream, deadline)?;
        if let Some(o) = outcome {
            return Ok(o);
        }
    }
}

fn try_instance(
    name: SuiteName,
    seed: u64,
    stream: u64,
    deadline: Option<Instant>,
) -> Result<Option<Outcome>> {
    let mut rng = rng_for(seed, stream);
    match name {
        SuiteName::Menger => {
            let g = random_multigraph(&mut rng, 8, 14);
            let x = random_vertex_set(&mut rng, &g, 0.4);
            let y = random_vertex_set(&mut rng, &g, 0.4);
            let flow = max_disjoint_paths(&g, &x, &y)?.len();
            let cut = crate::oracle::min_separation_order(&g, &x, &y);
            if flow == cut {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(minimize_menger(&g, &x, &y))))
            }
        }
        SuiteName::EmbedOracle => {
            let (h, g) = random_embedding_pair(&mut rng);
            let fast = match crate::topo::find_embedding_with_deadline(&h, &g, None, deadline) {
                Ok(r) => r.is_some(),
                Err(Error::Timeout) => return Ok(Some(Outcome::Undecided)),
                Err(e) => return Err(e),
            };
            let slow = crate::oracle::embedding_exists_exhaustive(&h, &g, None);
            if fast == slow {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(json!({
                    "suite": "embed-oracle",
                    "pattern": h,
                    "host": g,
                    "searcher": fast,
                    "oracle": slow,
                }))))
            }
        }
        SuiteName::Lemma41 => {
            let (g, d) = random_decomposed_graph(&mut rng, 8, 7, 3, 0.5);
            if validate(&g, &d).is_err() {
                return Ok(None);
            }
            use rand::Rng;
            let nodes: Vec<String> = d.nodes().cloned().collect();
            let t1 = nodes[rng.gen_range(0..nodes.len())].clone();
            let descendants: Vec<String> = d.descendants(&t1)?.into_iter().collect();
            let t2 = descendants[rng.gen_range(0..descendants.len())].clone();
            // a random separation with the bags on the right sides
            let seps = enumerate_separations(&g, g.n())?;
            let ok: Vec<_> = seps
                .into_iter()
                .filter(|s| d.bag(&t1).unwrap().is_subset(&s.a) && d.bag(&t2).unwrap().is_subset(&s.b))
                .collect();
            if ok.is_empty() {
                return Ok(None);
            }
            let sep = ok[rng.gen_range(0..ok.len())].clone();
            let shifted = shift_separation(&g, &d, &t1, &t2, &sep)?;
            let verdict = shifted.boundary() == sep.boundary()
                && verify_shifted(&g, &d, &t1, &t2, &shifted).is_ok();
            if verdict {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(json!({
                    "suite": "lemma41",
                    "graph": g,
                    "td": d,
                    "t1": t1, "t2": t2,
                    "sep": sep,
                }))))
            }
        }
        SuiteName::Lemma33 => {
            use rand::Rng;
            let s = 1 + rng.gen_range(0..2usize);
            let cols = 4 + rng.gen_range(0..3usize);
            let (g, d, small) = random_corridor(&mut rng, s, cols, 0.15);
            for a in 0..small.len() {
                for b in (a + 1)..small.len() {
                    for c in (b + 1)..small.len() {
                        let (t1, t2, t3) = (&small[a], &small[b], &small[c]);
                        let Ok(Some(sys)) = foundation_paths(&g, &d, t1, t3) else { continue };
                        let Ok(seg12) = restrict_system(&d, &sys, t1, t2) else { continue };
                        let Ok(seg23) = restrict_system(&d, &sys, t2, t3) else { continue };
                        let Ok(f12) = classify_static(&g, &d, t1, t2, &seg12) else { continue };
                        let Ok(f23) = classify_static(&g, &d, t2, t3, &seg23) else { continue };
                        let mut stat = vec![];
                        let mut rest = vec![];
                        let mut ok = true;
                        for i in 0..sys.len() {
                            if f12[i].applicable && f12[i].parent_side_static {
                                stat.push(i);
                            } else if f23[i].applicable
                                && f23[i].child_side_static
                                && !(f12[i].applicable && f12[i].parent_side_static)
                            {
                                rest.push(i);
                            } else {
                                ok = false;
                                break;
                            }
                        }
                        if !ok {
                            continue;
                        }
                        let r = stat.len();
                        let ordered = PathSystem {
                            paths: stat
                                .iter()
                                .chain(rest.iter())
                                .map(|&i| sys.paths[i].clone())
                                .collect(),
                            from: sys.from.clone(),
                            to: sys.to.clone(),
                        };
                        // the conclusion is asserted inside progress_shift
                        return Ok(Some(match progress_shift(&g, &d, t1, t2, t3, &ordered, r) {
                            Ok(_) => Outcome::Pass,
                            Err(Error::Internal(msg)) => Outcome::Fail(json!({
                                "suite": "lemma33",
                                "graph": g,
                                "td": d,
                                "nodes": [t1, t2, t3],
                                "r": r,
                                "error": msg,
                            })),
                            Err(e) => return Err(e),
                        }));
                    }
                }
            }
            Ok(None)
        }
        SuiteName::Lemma43 => {
            use rand::Rng;
            let (g, d) = random_decomposed_graph(&mut rng, 8, 7, 3, 0.5);
            if validate(&g, &d).is_err() {
                return Ok(None);
            }
            let n = 1 + rng.gen_range(0..3usize);
            let Some(v) = find_unlinked_violation(&g, &d, n)? else {
                return Ok(None);
            };
            let improved = improve_unlinked(&g, &d, &v.t1, &v.t2, &v.sep)?;
            let max_order = (metrics(&d).width + 1).max(1) as usize;
            let valid = validate(&g, &improved).is_ok();
            let width_ok = metrics(&improved).width <= metrics(&d).width;
            let sig_ok = compare_signatures(&signature(&g, &improved, max_order)?, &signature(&g, &d, max_order)?)?
                == Ordering::Greater;
            let inc_ok = is_incorporated(&g, &improved, &v.sep)?.is_some();
            if valid && width_ok && sig_ok && inc_ok {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(json!({
                    "suite": "lemma43",
                    "graph": g,
                    "td": d,
                    "witness": v,
                    "valid": valid, "width_ok": width_ok, "sig_ok": sig_ok, "inc_ok": inc_ok,
                }))))
            }
        }
        SuiteName::Lemma44 => {
            use rand::Rng;
            let beads = 4 + rng.gen_range(0..3usize);
            let (g, d) = random_beaded_chain(&mut rng, beads);
            if g.n() > 8 || validate(&g, &d).is_err() {
                return Ok(None);
            }
            let n = 1 + rng.gen_range(0..2usize);
            let Some(v) = find_unintegrated_violation(&g, &d, n)? else {
                return Ok(None);
            };
            let (improved, realized) = improve_unintegrated(&g, &d, &v.chain, &v.sep)?;
            let max_order = (metrics(&d).width + 1).max(1) as usize;
            let valid = validate(&g, &improved).is_ok();
            let width_ok = metrics(&improved).width <= metrics(&d).width;
            let sig_ok = compare_signatures(&signature(&g, &improved, max_order)?, &signature(&g, &d, max_order)?)?
                == Ordering::Greater;
            let inc_ok = is_incorporated(&g, &improved, &realized)?.is_some();
            if valid && width_ok && sig_ok && inc_ok {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(json!({
                    "suite": "lemma44",
                    "graph": g,
                    "td": d,
                    "witness": v,
                    "valid": valid, "width_ok": width_ok, "sig_ok": sig_ok, "inc_ok": inc_ok,
                }))))
            }
        }
        SuiteName::Lemma62 => {
            let q = random_quasi_order(&mut rng, 3);
            let (s, ad) = random_anchored_assemblage(&mut rng, 6, 4, 3, 2, &q);
            if s.graph.n() > 10 {
                return Ok(None);
            }
            let (s2, ad2) = grow_assemblage(&mut rng, &s, &ad);
            if s2.graph.n() > 10 {
                return Ok(None);
            }
            let ords = canonical_orderings(&ad);
            let ords2 = canonical_orderings(&ad2);
            let Ok(enc1) = encoding_at(&s, &ad, ad.decomp.root(), &ords) else {
                return Ok(None);
            };
            let Ok(enc2) = encoding_at(&s2, &ad2, ad2.decomp.root(), &ords2) else {
                return Ok(None);
            };
            let enc_sim = match find_simulation_with_deadline(&enc1, &enc2, deadline) {
                Ok(r) => r.is_some(),
                Err(Error::Timeout) => return Ok(Some(Outcome::Undecided)),
                Err(e) => return Err(e),
            };
            if !enc_sim {
                return Ok(None);
            }
            let full = match find_simulation_with_deadline(&s, &s2, deadline) {
                Ok(r) => r.is_some(),
                Err(Error::Timeout) => return Ok(Some(Outcome::Undecided)),
                Err(e) => return Err(e),
            };
            if full {
                Ok(Some(Outcome::Pass))
            } else {
                Ok(Some(Outcome::Fail(json!({
                    "suite": "lemma62",
                    "small": s,
                    "small_anchored": ad,
                    "big": s2,
                    "big_anchored": ad2,
                }))))
            }
        }
        SuiteName::Claim3 => {
            let Some((s, ad, n)) = decoration_instance(&mut rng)? else {
                return Ok(None);
            };
            match decoration_from_decomposition(&s, &ad, n, 4, 3, 14) {
                Ok((tree, rep)) => {
                    let levels_ok = rep.levels.values().all(|&l| l <= rep.n_prime);
                    let dec_ok = crate::decorated::is_decorated(&tree)?.is_ok();
                    if levels_ok && dec_ok {
                        Ok(Some(Outcome::Pass))
                    } else {
                        Ok(Some(Outcome::Fail(json!({
                            "suite": "claim3",
                            "assemblage": s,
                            "anchored": ad,
                            "n": n,
                            "levels_ok": levels_ok,
                            "decorated": dec_ok,
                        }))))
                    }
                }
                Err(Error::Precondition(_)) => Ok(None),
                Err(Error::Internal(msg)) => Ok(Some(Outcome::Fail(json!({
                    "suite": "claim3",
                    "assemblage": s,
                    "anchored": ad,
                    "n": n,
                    "error": msg,
                })))),
                Err(e) => Err(e),
            }
        }
        SuiteName::Claim4 => {
            let Some((s, ad, n)) = decoration_instance(&mut rng)? else {
                return Ok(None);
            };
            let Ok((tree, rep)) = decoration_from_decomposition(&s, &ad, n, 4, 3, 14) else {
                return Ok(None);
            };
            let nodes = tree.nodes();
            for v in &nodes {
                for w in &nodes {
                    if v == w || v == tree.root() || w == tree.root() {
                        continue;
                    }
                    if !crate::decorated::precedes(&tree, v, w)? {
                        continue;
                    }
                    // index-aligned linkage, then branch simulation
                    let gv = &rep.gammas[v];
                    let gw = &rep.gammas[w];
                    let endpoint_pairs: Vec<(String, String)> = gv
                        .vertices
                        .iter()
                        .cloned()
                        .zip(gw.vertices.iter().cloned())
                        .collect();
                    let linked = disjoint_linkage(&s.graph, &endpoint_pairs)?.is_some();
                    let key_v = subdivision_key(&ad, v);
                    let key_w = subdivision_key(&ad, w);
                    let bv = branch_at(&s, &ad, v, &rep.orderings[&key_v])?;
                    let bw = branch_at(&s, &ad, w, &rep.orderings[&key_w])?;
                    let sim = match find_simulation_with_deadline(&bw, &bv, deadline) {
                        Ok(r) => r.is_some(),
                        Err(Error::Timeout) => return Ok(Some(Outcome::Undecided)),
                        Err(e) => return Err(e),
                    };
                    if !linked || !sim {
                        return Ok(Some(Outcome::Fail(json!({
                            "suite": "claim4",
                            "assemblage": s,
                            "v": v, "w": w,
                            "linked": linked, "simulates": sim,
                        }))));
                    }
                }
            }
            Ok(Some(Outcome::Pass))
        }
    }
}

fn subdivision_key(ad: &crate::assemblage::AnchoredDecomposition, t: &str) -> String {
    format!("{}>{}", ad.decomp.parent_of(t).unwrap(), t)
}

fn decoration_instance(
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Option<(crate::assemblage::QAssemblage, crate::assemblage::AnchoredDecomposition, usize)>> {
    use rand::Rng;
    let q = random_quasi_order(rng, 2);
    let (s, ad) = random_anchored_assemblage(rng, 6, 6, 3, 2, &q);
    if validate(&s.graph, &ad.decomp).is_err() {
        return Ok(None);
    }
    let n = 1 + rng.gen_range(0..3usize);
    if !is_n_unimpeded(&s, &ad, n, 14)? {
        return Ok(None);
    }
    if metrics(&ad.decomp).adhesion > 4 {
        return Ok(None);
    }
    Ok(Some((s, ad, n)))
}

/// Default orderings for encodings: the sorted bag intersection per non-root
/// node.
pub fn canonical_orderings(ad: &crate::assemblage::AnchoredDecomposition) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for t in ad.decomp.nodes() {
        if let Some(p) = ad.decomp.parent_of(t) {
            let shared: Vec<String> = ad
                .decomp
                .bag(t)
                .unwrap()
                .intersection(ad.decomp.bag(p).unwrap())
                .cloned()
                .collect();
            out.insert(t.clone(), shared);
        }
    }
    out
}

/// Greedy shrink of a failing Menger instance: drop vertices and edges while
/// the disagreement persists.
fn minimize_menger(
    g0: &crate::graph::Multigraph,
    x0: &VertexSet,
    y0: &VertexSet,
) -> serde_json::Value {
    let disagrees = |g: &crate::graph::Multigraph, x: &VertexSet, y: &VertexSet| -> bool {
        match max_disjoint_paths(g, x, y) {
            Ok(sys) => sys.len() != crate::oracle::min_separation_order(g, x, y),
            Err(_) => false,
        }
    };
    let mut g = g0.clone();
    let mut x = x0.clone();
    let mut y = y0.clone();
    loop {
        let mut shrunk = false;
        for v in g.vertices().to_vec() {
            let keep: VertexSet = g.vertices().iter().filter(|w| **w != v).cloned().collect();
            let g2 = g.induced(&keep);
            let x2: VertexSet = x.iter().filter(|w| **w != v).cloned().collect();
            let y2: VertexSet = y.iter().filter(|w| **w != v).cloned().collect();
            if disagrees(&g2, &x2, &y2) {
                g = g2;
                x = x2;
                y = y2;
                shrunk = true;
                break;
            }
        }
        if shrunk {
            continue;
        }
        for id in 0..g.m() {
            let edges: Vec<(String, String)> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != id)
                .map(|(_, e)| e.clone())
                .collect();
            let g2 = crate::graph::Multigraph::new(g.vertices().iter().cloned(), edges).unwrap();
            if disagrees(&g2, &x, &y) {
                g = g2;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            break;
        }
    }
    json!({
        "suite": "menger",
        "graph": g,
        "X": x,
        "Y": y,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteTally {
    pub suite: String,
    pub count: u64,
    pub passed: u64,
    pub failed: u64,
    pub undecided: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<serde_json::Value>,
}

/// Runs `count` instances of a suite with the given seed.
pub fn run_suite(
    name: SuiteName,
    seed: u64,
    count: u64,
    deadline: Option<Instant>,
) -> Result<SuiteTally> {
    let mut tally = SuiteTally {
        suite: format!("{name:?}").to_lowercase(),
        count,
        passed: 0,
        failed: 0,
        undecided: 0,
        counterexamples: Vec::new(),
    };
    for index in 0..count {
        match run_instance(name, seed, index, deadline)? {
            Outcome::Pass => tally.passed += 1,
            Outcome::Undecided => tally.undecided += 1,
            Outcome::Fail(ce) => {
                tally.failed += 1;
                if tally.counterexamples.len() < 5 {
                    tally.counterexamples.push(ce);
                }
            }
        }
    }
    Ok(tally)
}

/// Replays a dumped counterexample: re-evaluates the suite property on the
/// embedded instance. Returns the fresh outcome.
pub fn replay(ce: &serde_json::Value) -> Result<Outcome> {
    let suite = ce
        .get("suite")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("counterexample lacks a suite tag".into()))?;
    let get = |k: &str| -> Result<&serde_json::Value> {
        ce.get(k).ok_or_else(|| Error::Parse(format!("counterexample lacks `{k}`")))
    };
    let graph = |k: &str| -> Result<crate::graph::Multigraph> {
        Ok(serde_json::from_value(get(k)?.clone())?)
    };
    match suite {
        "menger" => {
            let g = graph("graph")?;
            let x: VertexSet = serde_json::from_value(get("X")?.clone())?;
            let y: VertexSet = serde_json::from_value(get("Y")?.clone())?;
            let flow = max_disjoint_paths(&g, &x, &y)?.len();
            let cut = crate::oracle::min_separation_order(&g, &x, &y);
            Ok(if flow == cut { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
        }
        "embed-oracle" => {
            let h = graph("pattern")?;
            let g = graph("host")?;
            let fast = crate::topo::find_embedding(&h, &g, None)?.is_some();
            let slow = crate::oracle::embedding_exists_exhaustive(&h, &g, None);
            Ok(if fast == slow { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
        }
        "lemma41" => {
            let g = graph("graph")?;
            let d: crate::decomp::RootedDecomposition = serde_json::from_value(get("td")?.clone())?;
            let t1 = get("t1")?.as_str().unwrap_or_default().to_string();
            let t2 = get("t2")?.as_str().unwrap_or_default().to_string();
            let sep: crate::separation::Separation = serde_json::from_value(get("sep")?.clone())?;
            let shifted = shift_separation(&g, &d, &t1, &t2, &sep)?;
            let ok = shifted.boundary() == sep.boundary()
                && verify_shifted(&g, &d, &t1, &t2, &shifted).is_ok();
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
        }
        "lemma33" => {
            let g = graph("graph")?;
            let d: crate::decomp::RootedDecomposition = serde_json::from_value(get("td")?.clone())?;
            let nodes: Vec<String> = serde_json::from_value(get("nodes")?.clone())?;
            let r: usize = serde_json::from_value(get("r")?.clone())?;
            let sys = foundation_paths(&g, &d, &nodes[0], &nodes[2])?
                .ok_or_else(|| Error::Precondition("no foundation paths on replay".into()))?;
            let f12 = classify_static(&g, &d, &nodes[0], &nodes[1], &restrict_system(&d, &sys, &nodes[0], &nodes[1])?)?;
            let mut stat = vec![];
            let mut rest = vec![];
            for i in 0..sys.len() {
                if f12[i].applicable && f12[i].parent_side_static {
                    stat.push(i);
                } else {
                    rest.push(i);
                }
            }
            let ordered = PathSystem {
                paths: stat.iter().chain(rest.iter()).map(|&i| sys.paths[i].clone()).collect(),
                from: sys.from.clone(),
                to: sys.to.clone(),
            };
            match progress_shift(&g, &d, &nodes[0], &nodes[1], &nodes[2], &ordered, r) {
                Ok(_) => Ok(Outcome::Pass),
                Err(Error::Internal(_)) => Ok(Outcome::Fail(ce.clone())),
                Err(e) => Err(e),
            }
        }
        "lemma43" | "lemma44" => {
            let g = graph("graph")?;
            let d: crate::decomp::RootedDecomposition = serde_json::from_value(get("td")?.clone())?;
            let max_order = (metrics(&d).width + 1).max(1) as usize;
            if suite == "lemma43" {
                let w: crate::refine::UnlinkedViolation = serde_json::from_value(get("witness")?.clone())?;
                let improved = improve_unlinked(&g, &d, &w.t1, &w.t2, &w.sep)?;
                let ok = validate(&g, &improved).is_ok()
                    && metrics(&improved).width <= metrics(&d).width
                    && compare_signatures(&signature(&g, &improved, max_order)?, &signature(&g, &d, max_order)?)?
                        == Ordering::Greater
                    && is_incorporated(&g, &improved, &w.sep)?.is_some();
                Ok(if ok { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
            } else {
                let w: crate::refine::UnintegratedViolation = serde_json::from_value(get("witness")?.clone())?;
                let (improved, realized) = improve_unintegrated(&g, &d, &w.chain, &w.sep)?;
                let ok = validate(&g, &improved).is_ok()
                    && metrics(&improved).width <= metrics(&d).width
                    && compare_signatures(&signature(&g, &improved, max_order)?, &signature(&g, &d, max_order)?)?
                        == Ordering::Greater
                    && is_incorporated(&g, &improved, &realized)?.is_some();
                Ok(if ok { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
            }
        }
        "lemma62" => {
            let small: crate::assemblage::QAssemblage = serde_json::from_value(get("small")?.clone())?;
            let big: crate::assemblage::QAssemblage = serde_json::from_value(get("big")?.clone())?;
            let sad: crate::assemblage::AnchoredDecomposition =
                serde_json::from_value(get("small_anchored")?.clone())?;
            let bad: crate::assemblage::AnchoredDecomposition =
                serde_json::from_value(get("big_anchored")?.clone())?;
            let enc1 = encoding_at(&small, &sad, sad.decomp.root(), &canonical_orderings(&sad))?;
            let enc2 = encoding_at(&big, &bad, bad.decomp.root(), &canonical_orderings(&bad))?;
            if find_simulation_with_deadline(&enc1, &enc2, None)?.is_none() {
                return Ok(Outcome::Undecided);
            }
            let ok = find_simulation_with_deadline(&small, &big, None)?.is_some();
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
        }
        "claim3" | "claim4" => {
            let s: crate::assemblage::QAssemblage = serde_json::from_value(get("assemblage")?.clone())?;
            let ad: crate::assemblage::AnchoredDecomposition =
                serde_json::from_value(get("anchored")?.clone())?;
            let n: usize = serde_json::from_value(get("n")?.clone())?;
            match decoration_from_decomposition(&s, &ad, n, 4, 3, 14) {
                Ok((tree, rep)) => {
                    let ok = rep.levels.values().all(|&l| l <= rep.n_prime)
                        && crate::decorated::is_decorated(&tree)?.is_ok();
                    Ok(if ok { Outcome::Pass } else { Outcome::Fail(ce.clone()) })
                }
                Err(Error::Internal(_)) => Ok(Outcome::Fail(ce.clone())),
                Err(e) => Err(e),
            }
        }
        other => Err(Error::Parse(format!("unknown counterexample suite `{other}`"))),
    }
}
