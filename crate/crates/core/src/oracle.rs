//! Independent brute-force checkers used as test oracles and by the
//! verification suites. Deliberately naive: these must not share logic with
//! the production implementations they cross-check.

use std::collections::BTreeSet;

use crate::graph::{Multigraph, VertexSet};

/// Minimum order of a separation (A,B) with x ⊆ A and y ⊆ B, by exhaustive
/// search over candidate separators.
pub fn min_separation_order(g: &Multigraph, x: &VertexSet, y: &VertexSet) -> usize {
    let n = g.n();
    assert!(n <= 16, "oracle is exhaustive; host too large");
    let mut best = usize::MAX;
    for sep in 0u64..(1 << n) {
        let s: VertexSet = g.from_mask(sep);
        if s.len() >= best {
            continue;
        }
        if x.intersection(y).any(|v| !s.contains(v)) {
            continue;
        }
        let h = g.without(&s);
        let comps = h.components();
        let joined = comps
            .iter()
            .any(|c| x.iter().any(|v| c.contains(v)) && y.iter().any(|v| c.contains(v)));
        if !joined {
            best = best.min(s.len());
        }
    }
    best
}

/// Exhaustive two-edge-disjoint-path check: enumerates every pair of simple
/// edge paths and tests edge-disjointness directly.
pub fn two_edge_disjoint_exhaustive(g: &Multigraph, u: &str, v: &str, avoid_internal: &VertexSet) -> bool {
    let keep: VertexSet = g
        .vertices()
        .iter()
        .filter(|w| !avoid_internal.contains(*w) || w.as_str() == u || w.as_str() == v)
        .cloned()
        .collect();
    let h = g.induced(&keep);
    if !h.has_vertex(u) || !h.has_vertex(v) {
        return false;
    }
    if u == v {
        return h.edges().iter().filter(|(a, b)| a == u && b == u).count() >= 2;
    }
    let view = h.view();
    let ui = h.vertex_index(u).unwrap();
    let vi = h.vertex_index(v).unwrap();
    let mut paths: Vec<BTreeSet<usize>> = Vec::new();
    // enumerate simple paths as edge-id sets (trail with distinct vertices)
    fn dfs(
        view: &crate::graph::GraphView,
        at: usize,
        goal: usize,
        visited: &mut Vec<bool>,
        edges: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if at == goal {
            out.push(edges.iter().copied().collect());
            return;
        }
        for &(w, id) in &view.adj[at] {
            if w == at || visited[w] {
                continue;
            }
            visited[w] = true;
            edges.push(id);
            dfs(view, w, goal, visited, edges, out);
            edges.pop();
            visited[w] = false;
        }
    }
    let mut visited = vec![false; view.n];
    visited[ui] = true;
    dfs(&view, ui, vi, &mut visited, &mut Vec::new(), &mut paths);
    for (i, p) in paths.iter().enumerate() {
        for q in paths.iter().skip(i + 1) {
            if p.is_disjoint(q) {
                return true;
            }
        }
    }
    false
}

/// Axiom-by-axiom tree-decomposition check, written independently of
/// `decomp::validate`: connectivity of vertex traces is tested by exhaustive
/// pairwise node-path inspection.
pub fn decomposition_axioms_hold(g: &Multigraph, d: &crate::decomp::RootedDecomposition) -> bool {
    // bags subsets of V and cover V
    let mut covered: VertexSet = VertexSet::new();
    for bag in d.bags().values() {
        for v in bag {
            if !g.has_vertex(v) {
                return false;
            }
            covered.insert(v.clone());
        }
    }
    if covered != g.vertex_set() {
        return false;
    }
    // every edge inside some bag
    for (u, v) in g.edges() {
        if !d.bags().values().any(|bag| bag.contains(u) && bag.contains(v)) {
            return false;
        }
    }
    // traces connected: for each vertex, each pair of nodes holding it joined
    // by a tree path all of whose nodes hold it
    let nodes: Vec<&String> = d.nodes().collect();
    for v in g.vertices() {
        let holding: Vec<&&String> = nodes.iter().filter(|t| d.bag(t).unwrap().contains(v)).collect();
        for &s in &holding {
            for &t in &holding {
                let path = d.tree_path(s, t).unwrap();
                if !path.iter().all(|n| d.bag(n).unwrap().contains(v)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Exhaustive homeomorphic-embedding decision, written independently of the
/// production searcher: enumerate every injection in lexicographic vertex
/// order, precompute every candidate image per pattern edge, then scan image
/// tuples with pairwise axiom checks. Guarded to tiny hosts.
pub fn embedding_exists_exhaustive(
    h: &Multigraph,
    g: &Multigraph,
    label_leq: Option<&dyn Fn(&str, &str) -> bool>,
) -> bool {
    assert!(g.n() <= 7 && g.m() <= 10, "oracle is exhaustive; host too large");
    if h.n() > g.n() || h.m() > g.m() {
        return false;
    }
    let gview = g.view();

    // all simple edge paths between two host vertices / cycles at a vertex,
    // as (vertex sequence, edge id sequence)
    fn walks(gview: &crate::graph::GraphView, s: usize, t: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        let mut verts = vec![s];
        let mut eids: Vec<usize> = Vec::new();
        fn go(
            gview: &crate::graph::GraphView,
            t: usize,
            verts: &mut Vec<usize>,
            eids: &mut Vec<usize>,
            out: &mut Vec<(Vec<usize>, Vec<usize>)>,
        ) {
            let at = *verts.last().unwrap();
            for &(w, id) in &gview.adj[at] {
                if eids.contains(&id) {
                    continue;
                }
                if w == t {
                    verts.push(w);
                    eids.push(id);
                    out.push((verts.clone(), eids.clone()));
                    eids.pop();
                    verts.pop();
                    continue;
                }
                if verts.contains(&w) {
                    continue;
                }
                verts.push(w);
                eids.push(id);
                go(gview, t, verts, eids, out);
                eids.pop();
                verts.pop();
            }
        }
        go(gview, t, &mut verts, &mut eids, &mut out);
        out
    }

    let hn = h.n();
    let mut assignment = vec![usize::MAX; hn];
    let mut used = vec![false; g.n()];

    fn compatible(a: &(Vec<usize>, Vec<usize>), b: &(Vec<usize>, Vec<usize>), allowed_shared: &BTreeSet<usize>) -> bool {
        let ea: BTreeSet<usize> = a.1.iter().copied().collect();
        let eb: BTreeSet<usize> = b.1.iter().copied().collect();
        if !ea.is_disjoint(&eb) {
            return false;
        }
        let va: BTreeSet<usize> = a.0.iter().copied().collect();
        let vb: BTreeSet<usize> = b.0.iter().copied().collect();
        va.intersection(&vb).all(|v| allowed_shared.contains(v))
    }

    fn images_ok(
        h: &Multigraph,
        assignment: &[usize],
        chosen: &[(Vec<usize>, Vec<usize>)],
        he: usize,
    ) -> bool {
        // branch vertices on the new image only if incident
        let (hu, hv) = {
            let (u, v) = &h.edges()[he];
            (h.vertex_index(u).unwrap(), h.vertex_index(v).unwrap())
        };
        for (hw, &img) in assignment.iter().enumerate() {
            if chosen[he].0.contains(&img) && hw != hu && hw != hv {
                return false;
            }
        }
        for prev in 0..he {
            let (pu, pv) = {
                let (u, v) = &h.edges()[prev];
                (h.vertex_index(u).unwrap(), h.vertex_index(v).unwrap())
            };
            let shared: BTreeSet<usize> = [hu, hv]
                .iter()
                .filter(|x| [pu, pv].contains(x))
                .map(|&x| assignment[x])
                .collect();
            if !compatible(&chosen[he], &chosen[prev], &shared) {
                return false;
            }
        }
        true
    }

    fn route_all(
        h: &Multigraph,
        gview: &crate::graph::GraphView,
        assignment: &[usize],
        he: usize,
        chosen: &mut Vec<(Vec<usize>, Vec<usize>)>,
        walks_fn: &dyn Fn(&crate::graph::GraphView, usize, usize) -> Vec<(Vec<usize>, Vec<usize>)>,
    ) -> bool {
        if he == h.m() {
            return true;
        }
        let (u, v) = &h.edges()[he];
        let s = assignment[h.vertex_index(u).unwrap()];
        let t = assignment[h.vertex_index(v).unwrap()];
        for w in walks_fn(gview, s, t) {
            // a loop image must be a cycle (first == last already by construction)
            chosen.push(w);
            if images_ok(h, assignment, chosen, he) && route_all(h, gview, assignment, he + 1, chosen, walks_fn) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn assign(
        h: &Multigraph,
        g: &Multigraph,
        gview: &crate::graph::GraphView,
        hv: usize,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
        label_leq: &Option<&dyn Fn(&str, &str) -> bool>,
    ) -> bool {
        if hv == h.n() {
            let mut chosen = Vec::new();
            return route_all(h, gview, assignment, 0, &mut chosen, &walks);
        }
        for gv in 0..g.n() {
            if used[gv] {
                continue;
            }
            if let Some(leq) = label_leq {
                let hl = h.label_of(h.name_of(hv)).unwrap_or("");
                let gl = g.label_of(g.name_of(gv)).unwrap_or("");
                if !leq(hl, gl) {
                    continue;
                }
            }
            assignment[hv] = gv;
            used[gv] = true;
            if assign(h, g, gview, hv + 1, assignment, used, label_leq) {
                return true;
            }
            used[gv] = false;
            assignment[hv] = usize::MAX;
        }
        false
    }

    assign(h, g, &gview, 0, &mut assignment, &mut used, &label_leq)
}

/// Exhaustive Higman-style subsequence search over index tuples.
pub fn higman_exhaustive(
    a: &[String],
    b: &[String],
    leq: &dyn Fn(&str, &str) -> bool,
) -> bool {
    fn go(a: &[String], b: &[String], ai: usize, bi: usize, leq: &dyn Fn(&str, &str) -> bool) -> bool {
        if ai == a.len() {
            return true;
        }
        if b.len() - bi < a.len() - ai {
            return false;
        }
        for j in bi..b.len() {
            if leq(&a[ai], &b[j]) && go(a, b, ai + 1, j + 1, leq) {
                return true;
            }
        }
        false
    }
    go(a, b, 0, 0, leq)
}

/// Brute-force strip enumeration: every subsequence of nodes satisfying the
/// five strip conditions, checked directly from the definitions. Used to
/// cross-check the incremental search for completeness.
pub fn all_strips_exhaustive(
    g: &Multigraph,
    d: &crate::decomp::RootedDecomposition,
    z: &VertexSet,
    s: usize,
) -> Vec<Vec<String>> {
    let nodes: Vec<String> = d.nodes().cloned().collect();
    assert!(nodes.len() <= 16, "oracle is exhaustive; tree too large");
    let mut out = Vec::new();
    for mask in 1u64..(1 << nodes.len()) {
        let chosen: Vec<String> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        // order by ancestry: must form a chain
        let mut chain = chosen.clone();
        chain.sort_by_key(|t| d.depth_of(t).unwrap());
        let mut is_chain = true;
        for w in chain.windows(2) {
            if !d.is_ancestor(&w[0], &w[1]).unwrap() {
                is_chain = false;
                break;
            }
        }
        if !is_chain {
            continue;
        }
        let ok = (|| -> crate::error::Result<bool> {
            for w in chain.windows(2) {
                if !crate::decomp::is_precursor(d, &w[0], &w[1])? {
                    return Ok(false);
                }
            }
            let mut residues: Vec<VertexSet> = Vec::new();
            for t in &chain {
                let bag = d.bag(t)?;
                if !z.iter().all(|v| bag.contains(v)) {
                    return Ok(false);
                }
                let r: VertexSet = bag.difference(z).cloned().collect();
                if r.len() != s || r.is_empty() {
                    return Ok(false);
                }
                for o in &residues {
                    if !r.is_disjoint(o) {
                        return Ok(false);
                    }
                }
                residues.push(r);
            }
            let k = d.bag(&chain[0])?.len();
            for t in d.tree_path(&chain[0], chain.last().unwrap())? {
                if d.bag(&t)?.len() == k
                    && crate::strips::node_is_pseudo_edge_cut(g, d, &t, z)?
                {
                    return Ok(false);
                }
            }
            let sys =
                crate::paths::max_disjoint_paths(g, d.bag(&chain[0])?, d.bag(chain.last().unwrap())?)?;
            Ok(sys.len() == k)
        })()
        .unwrap_or(false);
        if ok {
            out.push(chain);
        }
    }
    out
}
