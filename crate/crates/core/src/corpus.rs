//! Seeded random instance generators for the verification suites. All
//! generators are rejection samplers: they draw small random structures and
//! keep those satisfying the target property's hypotheses.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::assemblage::{AnchoredDecomposition, Label, QAssemblage};
use crate::decomp::RootedDecomposition;
use crate::graph::{Multigraph, VertexSet};
use crate::quasiorder::FiniteQuasiOrder;
use crate::topo::March;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// A random multigraph with up to `max_n` vertices and `max_m` edges;
/// parallel edges and loops appear with small probability.
pub fn random_multigraph(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Multigraph {
    let n = rng.gen_range(1..=max_n);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let m = rng.gen_range(0..=max_m);
    let mut edges = Vec::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = if rng.gen_bool(0.06) { a } else { rng.gen_range(0..n) };
        edges.push((names[a].clone(), names[b].clone()));
        if rng.gen_bool(0.12) && edges.len() < max_m {
            edges.push((names[a].clone(), names[b].clone()));
        }
    }
    edges.truncate(max_m);
    Multigraph::new(names, edges).unwrap()
}

pub fn random_vertex_set(rng: &mut ChaCha8Rng, g: &Multigraph, p: f64) -> VertexSet {
    g.vertices().iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random rooted tree shape on `k` nodes named n0..n{k-1}, rooted at n0:
/// (parent, child) edges.
fn random_tree(rng: &mut ChaCha8Rng, k: usize) -> Vec<(String, String)> {
    let mut edges = Vec::new();
    for i in 1..k {
        let p = rng.gen_range(0..i);
        edges.push((format!("n{p}"), format!("n{i}")));
    }
    edges
}

/// A random graph-with-decomposition pair: every vertex is assigned a random
/// connected subtree of a random tree, the bags follow, and edges are
/// sampled inside bags. Width is bounded by construction.
pub fn random_decomposed_graph(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_nodes: usize,
    max_width: usize,
    edge_density: f64,
) -> (Multigraph, RootedDecomposition) {
    loop {
        let k = rng.gen_range(1..=max_nodes);
        let tree = random_tree(rng, k);
        let n = rng.gen_range(1..=max_n);
        let mut bags: BTreeMap<String, VertexSet> = (0..k)
            .map(|i| (format!("n{i}"), VertexSet::new()))
            .collect();
        // grow a connected subtree per vertex
        let children: BTreeMap<String, Vec<String>> = {
            let mut m: BTreeMap<String, Vec<String>> = Default::default();
            for (p, c) in &tree {
                m.entry(p.clone()).or_default().push(c.clone());
            }
            m
        };
        let parents: BTreeMap<String, String> =
            tree.iter().map(|(p, c)| (c.clone(), p.clone())).collect();
        for vi in 0..n {
            let v = format!("v{vi}");
            let start = rng.gen_range(0..k);
            let mut sub: Vec<String> = vec![format!("n{start}")];
            let grow = rng.gen_range(0..=2usize);
            for _ in 0..grow {
                let at = sub[rng.gen_range(0..sub.len())].clone();
                let mut cands: Vec<String> = children.get(&at).cloned().unwrap_or_default();
                if let Some(p) = parents.get(&at) {
                    cands.push(p.clone());
                }
                cands.retain(|c| !sub.contains(c));
                if let Some(c) = cands.get(rng.gen_range(0..cands.len().max(1))) {
                    sub.push(c.clone());
                }
            }
            for t in sub {
                bags.get_mut(&t).unwrap().insert(v.clone());
            }
        }
        if bags.values().any(|b| b.len() > max_width + 1) {
            continue;
        }
        // edges within bags
        let mut edges = Vec::new();
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        for bag in bags.values() {
            let vs: Vec<&String> = bag.iter().collect();
            for i in 0..vs.len() {
                for j in i..vs.len() {
                    if rng.gen_bool(edge_density) {
                        edges.push((vs[i].clone(), vs[j].clone()));
                        if rng.gen_bool(0.2) {
                            edges.push((vs[i].clone(), vs[j].clone()));
                        }
                    }
                }
            }
        }
        let g = Multigraph::new(names, edges).unwrap();
        let d = RootedDecomposition::new("n0".into(), bags, &tree).unwrap();
        debug_assert!(crate::decomp::validate(&g, &d).is_ok());
        return (g, d);
    }
}

/// A random corridor: `s` rails of `cols+1` columns with per-column edge
/// multiplicities in {1,2}, optional chords, and the standard chain
/// decomposition with small column bags. Used by the progress and strip
/// suites.
pub fn random_corridor(
    rng: &mut ChaCha8Rng,
    s: usize,
    cols: usize,
    chord_p: f64,
) -> (Multigraph, RootedDecomposition, Vec<String>) {
    let rail = |r: usize, i: usize| format!("r{r}c{i}");
    let mut vs = Vec::new();
    for r in 0..s {
        for i in 0..=cols {
            vs.push(rail(r, i));
        }
    }
    let mut es = Vec::new();
    for r in 0..s {
        for i in 0..cols {
            let e = (rail(r, i), rail(r, i + 1));
            es.push(e.clone());
            if rng.gen_bool(0.5) {
                es.push(e);
            }
        }
    }
    // occasional chord between rails, biased toward adjacent columns
    for r in 0..s {
        for r2 in (r + 1)..s {
            for i in 0..=cols {
                if rng.gen_bool(chord_p) {
                    let j = (i + rng.gen_range(0..=1)).min(cols);
                    es.push((rail(r, i), rail(r2, j)));
                }
            }
        }
    }
    let g = Multigraph::new(vs, es).unwrap();
    let mut bags = BTreeMap::new();
    let mut edges = Vec::new();
    let col_bag = |i: usize| -> VertexSet { (0..s).map(|r| rail(r, i)).collect() };
    let mut small_nodes = Vec::new();
    for i in 0..=cols {
        bags.insert(format!("n{i}"), col_bag(i));
        small_nodes.push(format!("n{i}"));
        if i > 0 {
            let mut wide = col_bag(i - 1);
            wide.extend(col_bag(i));
            bags.insert(format!("m{i}"), wide);
            edges.push((format!("n{}", i - 1), format!("m{i}")));
            edges.push((format!("m{i}"), format!("n{i}")));
        }
    }
    let d = RootedDecomposition::new("n0".into(), bags, &edges).unwrap();
    (g, d, small_nodes)
}

/// A random beaded chain: a path with per-gap multiplicities in {1,2}, an
/// optional doubled tail above the root, singleton bags at the beads and
/// pair bags between them, plus light random decoration. Integration
/// violations concentrate on this family.
pub fn random_beaded_chain(rng: &mut ChaCha8Rng, beads: usize) -> (Multigraph, RootedDecomposition) {
    let beads = beads.max(3);
    let mut vs: Vec<String> = (0..beads).map(|i| format!("v{i}")).collect();
    let mut es = Vec::new();
    // mostly doubled gaps with one or two isolated single gaps
    let mut singles: Vec<usize> = Vec::new();
    for _ in 0..rng.gen_range(1..=2usize) {
        singles.push(rng.gen_range(0..beads - 1));
    }
    for i in 0..beads - 1 {
        let e = (format!("v{i}"), format!("v{}", i + 1));
        es.push(e.clone());
        if !singles.contains(&i) && rng.gen_bool(0.85) {
            es.push(e);
        }
    }
    let mut bags: BTreeMap<String, VertexSet> = BTreeMap::new();
    let mut tree: Vec<(String, String)> = Vec::new();
    let mut prev = String::new();
    // optional tail above the first bead
    let mut root = "b0".to_string();
    if rng.gen_bool(0.8) {
        vs.push("u".into());
        es.push(("u".into(), "v0".into()));
        if rng.gen_bool(0.8) {
            es.push(("u".into(), "v0".into()));
        }
        bags.insert("rt".into(), ["u".to_string(), "v0".to_string()].into_iter().collect());
        root = "rt".to_string();
        prev = "rt".to_string();
    }
    for i in 0..beads {
        // singleton bags appear for some beads only; skipped beads are
        // covered by the pair bags alone, so no on-path node realizes them
        let singleton = i == 0 || i + 1 == beads || rng.gen_bool(0.55);
        if singleton {
            let b = format!("b{i}");
            bags.insert(b.clone(), [format!("v{i}")].into_iter().collect());
            if !prev.is_empty() {
                tree.push((prev.clone(), b.clone()));
            }
            prev = b.clone();
        }
        if i + 1 < beads {
            let m = format!("p{i}");
            bags.insert(
                m.clone(),
                [format!("v{i}"), format!("v{}", i + 1)].into_iter().collect(),
            );
            if !prev.is_empty() {
                tree.push((prev.clone(), m.clone()));
            }
            prev = m;
        }
    }
    if root == "b0" && !bags.contains_key("b0") {
        root = "p0".to_string();
    }
    // occasionally a pendant vertex hanging off a bead with a singleton bag
    if rng.gen_bool(0.3) && vs.len() < 8 {
        let with_bag: Vec<usize> = (0..beads).filter(|i| bags.contains_key(&format!("b{i}"))).collect();
        let i = with_bag[rng.gen_range(0..with_bag.len())];
        vs.push("p".into());
        es.push((format!("v{i}"), "p".into()));
        let node = format!("x{i}");
        bags.insert(node.clone(), [format!("v{i}"), "p".to_string()].into_iter().collect());
        tree.push((format!("b{i}"), node));
    }
    let g = Multigraph::new(vs, es).unwrap();
    let d = RootedDecomposition::new(root, bags, &tree).unwrap();
    (g, d)
}

/// Random (pattern, host) pair for the embedding oracle suite.
pub fn random_embedding_pair(rng: &mut ChaCha8Rng) -> (Multigraph, Multigraph) {
    let g = random_multigraph(rng, 6, 9);
    let h = random_multigraph(rng, 4, 5);
    (h, g)
}

/// Random quasi-order on a few elements: reflexive plus a transitively
/// closed random set of pairs.
pub fn random_quasi_order(rng: &mut ChaCha8Rng, max_elems: usize) -> FiniteQuasiOrder {
    let n = rng.gen_range(1..=max_elems);
    let elems: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut q = FiniteQuasiOrder {
        elements: elems.clone(),
        leq: elems.iter().map(|e| (e.clone(), e.clone())).collect(),
    };
    for _ in 0..rng.gen_range(0..=n * 2) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        q.leq.insert((elems[a].clone(), elems[b].clone()));
    }
    // transitive closure
    loop {
        let mut added = Vec::new();
        for (a, b) in &q.leq {
            for (c, d) in &q.leq {
                if b == c && !q.leq.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        q.leq.extend(added);
    }
    q
}

/// A random march over the vertices of a graph.
pub fn random_march(rng: &mut ChaCha8Rng, g: &Multigraph, max_len: usize) -> March {
    let mut pool: Vec<String> = g.vertices().to_vec();
    let len = rng.gen_range(0..=max_len.min(pool.len()));
    let mut vs = Vec::new();
    let mut ess = Vec::new();
    for _ in 0..len {
        let i = rng.gen_range(0..pool.len());
        vs.push(pool.swap_remove(i));
        ess.push(rng.gen_range(0..=2u8));
    }
    March::new(vs, ess).unwrap()
}

/// A random Q-assemblage with an anchored decomposition: the root march must
/// fit the root bag and every march its anchor's bag.
pub fn random_anchored_assemblage(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_nodes: usize,
    max_width: usize,
    max_marches: usize,
    order: &FiniteQuasiOrder,
) -> (QAssemblage, AnchoredDecomposition) {
    loop {
        let (g, d) = random_decomposed_graph(rng, max_n, max_nodes, max_width, 0.5);
        let root_bag: Vec<String> = d.bag(d.root()).unwrap().iter().cloned().collect();
        // root march inside the root bag
        let g0len = rng.gen_range(0..=root_bag.len().min(2));
        let mut pool = root_bag.clone();
        let mut g0v = Vec::new();
        let mut g0e = Vec::new();
        for _ in 0..g0len {
            let i = rng.gen_range(0..pool.len());
            g0v.push(pool.swap_remove(i));
            g0e.push(rng.gen_range(0..=2u8));
        }
        let gamma0 = March::new(g0v, g0e).unwrap();
        let nodes: Vec<String> = d.nodes().cloned().collect();
        let mut gammas = Vec::new();
        let mut alpha = Vec::new();
        let mut f = Vec::new();
        let want = rng.gen_range(0..=max_marches);
        for _ in 0..want {
            let t = nodes[rng.gen_range(0..nodes.len())].clone();
            let bag: Vec<String> = d.bag(&t).unwrap().iter().cloned().collect();
            if bag.is_empty() {
                continue;
            }
            let mut pool = bag;
            let len = rng.gen_range(1..=pool.len().min(2));
            let mut vs = Vec::new();
            let mut ess = Vec::new();
            for _ in 0..len {
                let i = rng.gen_range(0..pool.len());
                vs.push(pool.swap_remove(i));
                ess.push(rng.gen_range(0..=2u8));
            }
            gammas.push(March::new(vs, ess).unwrap());
            alpha.push(t);
            f.push(Label::Base(
                order.elements[rng.gen_range(0..order.elements.len())].clone(),
            ));
        }
        let phi: BTreeMap<String, Label> = g
            .vertices()
            .iter()
            .map(|v| {
                (
                    v.clone(),
                    Label::Base(order.elements[rng.gen_range(0..order.elements.len())].clone()),
                )
            })
            .collect();
        let s = QAssemblage {
            graph: g,
            gamma0,
            gammas,
            f,
            phi,
            order: order.clone(),
        };
        let ad = AnchoredDecomposition {
            decomp: d,
            alpha,
        };
        if ad.validate(&s).is_ok() {
            return (s, ad);
        }
    }
}

/// Grows a host assemblage from a pattern assemblage so that the host is
/// likely to simulate the pattern: subdivide some edges, add pendant
/// components, raise labels along the order, and append extra marches.
pub fn grow_assemblage(
    rng: &mut ChaCha8Rng,
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
) -> (QAssemblage, AnchoredDecomposition) {
    let mut vs: Vec<String> = s.graph.vertices().to_vec();
    let mut es: Vec<(String, String)> = Vec::new();
    let mut bags = ad.decomp.bags().clone();
    // subdivide a few edges (put the midpoint into a bag holding both ends)
    for (id, (u, v)) in s.graph.edges().iter().enumerate() {
        let host_bag = ad
            .decomp
            .bags()
            .iter()
            .find(|(_, b)| b.contains(u) && b.contains(v))
            .map(|(t, _)| t.clone());
        if rng.gen_bool(0.25) && u != v {
            if let Some(t) = host_bag {
                let mid = format!("w{id}");
                vs.push(mid.clone());
                es.push((u.clone(), mid.clone()));
                es.push((mid.clone(), v.clone()));
                bags.get_mut(&t).unwrap().insert(mid);
                continue;
            }
        }
        es.push((u.clone(), v.clone()));
        if rng.gen_bool(0.1) {
            es.push((u.clone(), v.clone()));
        }
    }
    // a pendant vertex somewhere
    if rng.gen_bool(0.5) {
        let t = {
            let nodes: Vec<&String> = bags.keys().collect();
            nodes[rng.gen_range(0..nodes.len())].clone()
        };
        let fresh = format!("p{}", vs.len());
        if let Some(anchor) = bags[&t].iter().next().cloned() {
            vs.push(fresh.clone());
            es.push((anchor, fresh.clone()));
            bags.get_mut(&t).unwrap().insert(fresh);
        }
    }
    let g2 = Multigraph::new(vs.clone(), es).unwrap();
    // labels: raise along the order where possible
    let raise = |rng: &mut ChaCha8Rng, l: &Label| -> Label {
        match l {
            Label::Base(x) => {
                let ups: Vec<&String> = s
                    .order
                    .elements
                    .iter()
                    .filter(|y| s.order.leq(x, y).unwrap_or(false))
                    .collect();
                Label::Base(ups[rng.gen_range(0..ups.len())].clone())
            }
            other => other.clone(),
        }
    };
    let mut phi: BTreeMap<String, Label> = BTreeMap::new();
    for v in &vs {
        let l = match s.phi.get(v) {
            Some(l) => raise(rng, l),
            None => Label::Base(s.order.elements[rng.gen_range(0..s.order.elements.len())].clone()),
        };
        phi.insert(v.clone(), l);
    }
    let mut gammas = s.gammas.clone();
    let mut f: Vec<Label> = s.f.iter().map(|l| raise(rng, l)).collect();
    let mut alpha = ad.alpha.clone();
    // an extra march to exercise the injection slack
    if rng.gen_bool(0.5) {
        let nodes: Vec<String> = bags.keys().cloned().collect();
        let t = nodes[rng.gen_range(0..nodes.len())].clone();
        let bag: Vec<String> = bags[&t].iter().cloned().collect();
        if !bag.is_empty() {
            let v = bag[rng.gen_range(0..bag.len())].clone();
            gammas.push(March::new(vec![v], vec![rng.gen_range(0..=2u8)]).unwrap());
            f.push(Label::Base(
                s.order.elements[rng.gen_range(0..s.order.elements.len())].clone(),
            ));
            alpha.push(t);
        }
    }
    let s2 = QAssemblage {
        graph: g2,
        gamma0: s.gamma0.clone(),
        gammas,
        f,
        phi,
        order: s.order.clone(),
    };
    let d2 = RootedDecomposition::new(
        ad.decomp.root().to_string(),
        bags,
        &ad.decomp.tree_edges(),
    )
    .unwrap();
    let ad2 = AnchoredDecomposition {
        decomp: d2,
        alpha,
    };
    (s2, ad2)
}

/// A staggered ladder: two mostly doubled rails with one single column
/// each at different positions, hung under a doubled tail. These are linked
/// but carry diagonal cuts of smaller thickness than any column bag, so
/// they drive the integration branch of the refinement loop.
pub fn staggered_ladder(rng: &mut ChaCha8Rng) -> (Multigraph, RootedDecomposition) {
    staggered_ladder_with(rng, 4)
}

pub fn staggered_ladder_with(rng: &mut ChaCha8Rng, cols: usize) -> (Multigraph, RootedDecomposition) {
    let s_top = 1 + rng.gen_range(0..cols - 2);
    let mut s_bot = 1 + rng.gen_range(0..cols - 2);
    if s_bot == s_top {
        s_bot = if s_top + 1 < cols - 1 { s_top + 1 } else { s_top - 1 };
    }
    let mut vs: Vec<String> = vec!["u".into()];
    let mut es: Vec<(String, String)> = Vec::new();
    for i in 0..=cols {
        vs.push(format!("x{i}"));
        vs.push(format!("y{i}"));
    }
    for (r, single) in [("x", s_top), ("y", s_bot)] {
        for i in 0..cols {
            let e = (format!("{r}{i}"), format!("{r}{}", i + 1));
            es.push(e.clone());
            if i != single {
                es.push(e);
            }
        }
    }
    for v in ["x0", "y0"] {
        es.push(("u".to_string(), v.to_string()));
        es.push(("u".to_string(), v.to_string()));
    }
    let g = Multigraph::new(vs, es).unwrap();
    let mut bags = BTreeMap::new();
    let mut edges = Vec::new();
    bags.insert(
        "rt".to_string(),
        ["u", "x0", "y0"].iter().map(|s| s.to_string()).collect::<VertexSet>(),
    );
    for i in 0..=cols {
        let col: VertexSet = [format!("x{i}"), format!("y{i}")].into_iter().collect();
        bags.insert(format!("n{i}"), col.clone());
        if i == 0 {
            edges.push(("rt".to_string(), "n0".to_string()));
        } else {
            let mut wide: VertexSet =
                [format!("x{}", i - 1), format!("y{}", i - 1)].into_iter().collect();
            wide.extend(col);
            bags.insert(format!("m{i}"), wide);
            edges.push((format!("n{}", i - 1), format!("m{i}")));
            edges.push((format!("m{i}"), format!("n{i}")));
        }
    }
    let d = RootedDecomposition::new("rt".into(), bags, &edges).unwrap();
    (g, d)
}
