//! Acceptance suite: every criterion runs standalone at its stated tolerance
//! and prints one pass/fail line.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use gwb_core::assemblage::{branch_at, find_simulation};
use gwb_core::corpus::*;
use gwb_core::decomp::{is_precursor, metrics, validate, RootedDecomposition};
use gwb_core::graph::{Multigraph, VertexSet};
use gwb_core::paths::max_disjoint_paths;
use gwb_core::refine::{is_n_integrated, is_n_linked, refine_driver};
use gwb_core::suites::{run_suite, SuiteName};
use gwb_core::topo::{contains_rc, find_embedding, robertson_chain};

fn verdict(name: &str, ok: bool) {
    println!("{} {}", if ok { "PASS" } else { "FAIL" }, name);
    assert!(ok, "criterion failed: {name}");
}

/// Robertson chain of length k with two extra leaves attached to each end.
fn leafed_chain(k: usize) -> Multigraph {
    let rc = robertson_chain(k).unwrap();
    let mut vs: Vec<String> = rc.vertices().to_vec();
    let mut es: Vec<(String, String)> = rc.edges().to_vec();
    for (end, tag) in [("v0".to_string(), "a"), (format!("v{k}"), "b")] {
        for j in 0..2 {
            let leaf = format!("leaf_{tag}{j}");
            vs.push(leaf.clone());
            es.push((end.clone(), leaf));
        }
    }
    Multigraph::new(vs, es).unwrap()
}

#[test]
fn unlabelled_antichain() {
    let gs: Vec<Multigraph> = (1..=5).map(leafed_chain).collect();
    let mut ok = true;
    for i in 0..5 {
        for j in 0..5 {
            if i == j {
                continue;
            }
            let found = find_embedding(&gs[i], &gs[j], None).unwrap();
            ok &= found.is_none();
        }
    }
    verdict("unlabelled antichain: 20 ordered pairs of leafed chains, all non-containments", ok);
}

/// Subdivided Robertson chain with ends labelled x and all else y.
fn subdivided_labelled(k: usize) -> Multigraph {
    let rc = robertson_chain(k).unwrap();
    let mut vs: Vec<String> = rc.vertices().to_vec();
    let mut es: Vec<(String, String)> = Vec::new();
    for (i, (u, v)) in rc.edges().iter().enumerate() {
        let mid = format!("s{i}");
        vs.push(mid.clone());
        es.push((u.clone(), mid.clone()));
        es.push((mid, v.clone()));
    }
    let mut labels = BTreeMap::new();
    for v in &vs {
        let lab = if v == "v0" || v == &format!("v{k}") { "x" } else { "y" };
        labels.insert(v.clone(), lab.to_string());
    }
    Multigraph::new(vs, es).unwrap().with_labels(labels).unwrap()
}

#[test]
fn labelled_antichain() {
    let gs: Vec<Multigraph> = (1..=4).map(subdivided_labelled).collect();
    let leq = |a: &str, b: &str| a == b; // x and y incomparable
    let mut ok = true;
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            ok &= find_embedding(&gs[i], &gs[j], Some(&leq)).unwrap().is_none();
        }
    }
    // sanity: without labels the containments do exist upward
    let bare1 = {
        let g = subdivided_labelled(1);
        Multigraph::new(g.vertices().iter().cloned(), g.edges().to_vec()).unwrap()
    };
    let bare3 = {
        let g = subdivided_labelled(3);
        Multigraph::new(g.vertices().iter().cloned(), g.edges().to_vec()).unwrap()
    };
    ok &= find_embedding(&bare1, &bare3, None).unwrap().is_some();
    verdict("labelled antichain: subdivided chains 1-4 pairwise incomparable", ok);
}

#[test]
fn menger_duality_500() {
    let tally = run_suite(SuiteName::Menger, 7, 500, None).unwrap();
    verdict(
        &format!("Menger duality: {}/500 seeded instances", tally.passed),
        tally.passed == 500 && tally.failed == 0,
    );
}

#[test]
fn embedding_oracle_300() {
    let tally = run_suite(SuiteName::EmbedOracle, 7, 300, None).unwrap();
    verdict(
        &format!("embedding soundness/completeness: {}/300 against exhaustive oracle", tally.passed),
        tally.passed == 300 && tally.failed == 0,
    );
}

#[test]
fn lemma41_500() {
    let tally = run_suite(SuiteName::Lemma41, 7, 500, None).unwrap();
    verdict(
        &format!("separation shifting: {}/500 satisfy (i)(ii)(iii)", tally.passed),
        tally.passed == 500 && tally.failed == 0,
    );
}

#[test]
fn lemma33_200() {
    let tally = run_suite(SuiteName::Lemma33, 7, 200, None).unwrap();
    verdict(
        &format!("progress shift: {}/200 pseudo-edge-cut conclusions", tally.passed),
        tally.passed == 200 && tally.failed == 0,
    );
}

#[test]
fn lemma43_100() {
    let tally = run_suite(SuiteName::Lemma43, 7, 100, None).unwrap();
    verdict(
        &format!("linkedness improvement: {}/100 witnesses improved", tally.passed),
        tally.passed == 100 && tally.failed == 0,
    );
}

#[test]
fn lemma44_100() {
    let tally = run_suite(SuiteName::Lemma44, 7, 100, None).unwrap();
    verdict(
        &format!("integration improvement: {}/100 witnesses improved", tally.passed),
        tally.passed == 100 && tally.failed == 0,
    );
}

fn driver_outputs() -> Vec<(Multigraph, RootedDecomposition, usize)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 100 {
        let mut rng = rng_for(1001, seed);
        seed += 1;
        let (g, d) = random_decomposed_graph(&mut rng, 8, 7, 3, 0.5);
        if validate(&g, &d).is_err() {
            continue;
        }
        let n = 1 + (seed % 3) as usize;
        let max_order = (metrics(&d).width + 1).max(1) as usize;
        let result = refine_driver(&g, &d, n, max_order, 200).unwrap();
        // per-iteration signature strictly increases on improvement steps
        let mut prev: Option<Vec<(usize, usize, u64)>> = None;
        for step in &result.trace {
            if step.step != "normalize" {
                if let Some(p) = &prev {
                    assert!(p < &step.signature, "signature must strictly increase");
                }
            }
            prev = Some(step.signature.clone());
        }
        out.push((g, result.decomposition, n));
    }
    out
}

#[test]
fn driver_and_corollaries() {
    let outputs = driver_outputs();
    let mut ok = true;
    for (g, d, n) in &outputs {
        ok &= is_n_linked(g, d, *n).unwrap();
        ok &= is_n_integrated(g, d, *n).unwrap();
        ok &= metrics(d).nested_edges;
    }
    verdict(
        "refinement driver: 100 outputs linked, integrated, nested within 200 steps",
        ok,
    );

    // weak linkedness corollary: on every output, each chain of N+1
    // consecutive precursors with pairwise distinct bags is fully linked
    let mut chains_checked = 0usize;
    let mut corollary_ok = true;
    for (g, d, n) in &outputs {
        let nodes: Vec<String> = d.nodes().cloned().collect();
        let mut chains: Vec<Vec<String>> = nodes.iter().map(|t| vec![t.clone()]).collect();
        for _ in 0..*n {
            let mut next = Vec::new();
            for c in &chains {
                let last = c.last().unwrap();
                for t in &nodes {
                    if is_precursor(d, last, t).unwrap() {
                        let mut c2 = c.clone();
                        c2.push(t.clone());
                        next.push(c2);
                    }
                }
            }
            chains = next;
        }
        for c in chains {
            let bags: Vec<&VertexSet> = c.iter().map(|t| d.bag(t).unwrap()).collect();
            let distinct = (0..bags.len()).all(|i| (0..i).all(|j| bags[i] != bags[j]));
            if !distinct {
                continue;
            }
            chains_checked += 1;
            let flow = max_disjoint_paths(g, bags[0], bags[1]).unwrap().len();
            corollary_ok &= flow == bags[0].len();
        }
    }
    verdict(
        &format!("weak linkedness corollary: {chains_checked} precursor chains fully linked"),
        corollary_ok,
    );

    // realizer elevation equality on every output
    let mut eq_ok = true;
    for (g, d, n) in &outputs {
        let w = metrics(d).width.max(0) as usize;
        let r = gwb_core::realize::graph_as_assemblage(g, d, w, *n, 14);
        eq_ok &= r.is_ok();
    }
    verdict("realizer ∅-elevation equals decomposition elevation on all outputs", eq_ok);
}

#[test]
fn lemma62_200() {
    let tally = run_suite(SuiteName::Lemma62, 7, 200, None).unwrap();
    verdict(
        &format!("encoding simulation transfer: {}/200 pairs", tally.passed),
        tally.passed == 200 && tally.failed == 0,
    );
}

#[test]
fn decoration_claims_1_and_3() {
    let tally = run_suite(SuiteName::Claim3, 7, 100, None).unwrap();
    verdict(
        &format!("decoration levels and validity: {}/100 instances", tally.passed),
        tally.passed == 100 && tally.failed == 0,
    );
}

#[test]
fn decoration_claim_4() {
    let tally = run_suite(SuiteName::Claim4, 7, 100, None).unwrap();
    verdict(
        &format!("precedes implies branch simulation: {}/100 instances, zero failures", tally.passed),
        tally.passed == 100 && tally.failed == 0,
    );
}

/// One chain-shaped hypothesis bundle for the chain-construction lemma:
/// bags on a path with Z inside all of them, disjoint residues, a full
/// disjoint path family, and the per-step two-edge-disjoint clause.
struct ChainInstance {
    g: Multigraph,
    z: VertexSet,
    k: usize,
    bags: Vec<VertexSet>,
}

impl ChainInstance {
    fn hypotheses_hold(&self) -> bool {
        let r = self.bags.len();
        let k = self.k;
        let x1 = &self.bags[0];
        let threshold = k * (k + 1) * x1.len().pow(2 * k as u32 + 2) + k + 3;
        if r < threshold {
            return false;
        }
        for b in &self.bags {
            if !self.z.iter().all(|v| b.contains(v)) {
                return false;
            }
        }
        let residues: Vec<VertexSet> = self
            .bags
            .iter()
            .map(|b| b.difference(&self.z).cloned().collect())
            .collect();
        for i in 0..residues.len() {
            for j in 0..i {
                if !residues[i].is_disjoint(&residues[j]) {
                    return false;
                }
            }
            if residues[i].len() != residues[0].len() || residues[i].is_empty() {
                return false;
            }
        }
        let sys = max_disjoint_paths(&self.g, x1, self.bags.last().unwrap()).unwrap();
        if sys.len() != x1.len() {
            return false;
        }
        // member through the residues: one vertex per bag, two edge-disjoint
        // connections between consecutive ones avoiding the bag interiors
        let gz = self.g.without(&self.z);
        for i in 0..r - 1 {
            let vi: Vec<&String> = residues[i].iter().collect();
            let vi1: Vec<&String> = residues[i + 1].iter().collect();
            let (a, b) = (vi[0], vi1[0]);
            let avoid: VertexSet = self.bags[i]
                .union(&self.bags[i + 1])
                .filter(|x| x.as_str() != a && x.as_str() != b && gz.has_vertex(x))
                .cloned()
                .collect();
            if !gwb_core::paths::two_edge_disjoint_paths(&gz, a, b, &avoid).unwrap() {
                return false;
            }
        }
        true
    }
}

#[test]
fn chain_construction_spot_checks() {
    let mut instances: Vec<(ChainInstance, usize)> = Vec::new();
    // plain doubled chains at and above the bound, for both k values
    for (k, len) in [(1usize, 5usize), (1, 8), (2, 10), (2, 13)] {
        let g = robertson_chain(len).unwrap();
        let bags: Vec<VertexSet> = (0..=len).map(|i| [format!("v{i}")].into_iter().collect()).collect();
        instances.push((
            ChainInstance {
                g,
                z: VertexSet::new(),
                k,
                bags,
            },
            k,
        ));
    }
    // apex variant: Z is an apex vertex sitting in every bag
    {
        let len = 35usize;
        let rc = robertson_chain(len).unwrap();
        let mut vs: Vec<String> = rc.vertices().to_vec();
        vs.push("z".into());
        let mut es: Vec<(String, String)> = rc.edges().to_vec();
        es.push(("z".into(), "v0".into()));
        es.push(("z".into(), "v0".into()));
        let g = Multigraph::new(vs, es).unwrap();
        let bags: Vec<VertexSet> = (0..=len)
            .map(|i| ["z".to_string(), format!("v{i}")].into_iter().collect())
            .collect();
        instances.push((
            ChainInstance {
                g,
                z: ["z".to_string()].into_iter().collect(),
                k: 1,
                bags,
            },
            1,
        ));
    }
    let mut ok = true;
    for (inst, k) in &instances {
        ok &= inst.hypotheses_hold();
        let gz = inst.g.without(&inst.z);
        ok &= contains_rc(&gz, *k).unwrap();
    }
    verdict(
        &format!("chain construction spot-check: {}/5 hypothesis-verified instances contain the chain", instances.len()),
        ok && instances.len() == 5,
    );
}

#[test]
fn determinism_and_round_trips() {
    // canonical graph serialization round-trips byte-identically
    let canon = r#"{"vertices":["a","b","c"],"edges":[["a","b"],["a","b"],["b","c"]],"labels":{"a":"x","b":"y","c":"y"}}"#;
    let g = Multigraph::parse(canon).unwrap();
    let mut ok = g.serialize() == canon && Multigraph::parse(&g.serialize()).unwrap() == g;

    // decomposition serialization round-trips
    let d = RootedDecomposition::parse(
        r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"]},"edges":[["t1","t2"]]}"#,
    )
    .unwrap();
    ok &= RootedDecomposition::parse(&d.serialize()).unwrap() == d;

    // assemblage canonical form round-trips
    {
        let mut rng = rng_for(9, 0);
        let q = random_quasi_order(&mut rng, 3);
        let (s, _) = random_anchored_assemblage(&mut rng, 6, 4, 3, 2, &q);
        let back = gwb_core::assemblage::QAssemblage::parse(&s.canon()).unwrap();
        ok &= back.canon() == s.canon();
    }

    // fixed-seed suite tallies are byte-identical across runs
    for name in [SuiteName::Menger, SuiteName::Lemma41, SuiteName::Lemma62] {
        let a = serde_json::to_string(&run_suite(name, 13, 25, None).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(name, 13, 25, None).unwrap()).unwrap();
        ok &= a == b;
    }
    verdict("determinism: byte-identical round-trips and fixed-seed reports", ok);
}
