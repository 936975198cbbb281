//! Node-realizers of anchored decompositions, Γ-elevation, the unimpeded
//! condition, and decoration extraction via choppers and levels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::assemblage::{branch_at, essential_number, AnchoredDecomposition, QAssemblage};
use crate::decomp::{is_precursor, metrics, up_down, RootedDecomposition};
use crate::decorated::DecoratedTree;
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::paths::max_disjoint_paths;
use crate::quasiorder::FiniteQuasiOrder;
use crate::strips::depth_and_elevation_with;
use crate::topo::March;

/// The subdivided decomposition exposing adhesion bags, plus a fresh root
/// whose bag is the root march.
#[derive(Debug, Clone)]
pub struct NodeRealizer {
    pub decomp: RootedDecomposition,
    pub alpha: Vec<String>,
    /// subdivision node -> head (child) original node
    pub edge_nodes: BTreeMap<String, String>,
    pub new_root: String,
}

/// Subdivides every tree edge with the bag intersection and hangs a new root
/// carrying the root march's vertex set above the old root.
pub fn node_realizer(s: &QAssemblage, ad: &AnchoredDecomposition) -> Result<NodeRealizer> {
    ad.validate(s)?;
    let d = &ad.decomp;
    let taken: BTreeSet<String> = d.nodes().cloned().collect();
    let mut bags: BTreeMap<String, VertexSet> = d.bags().clone();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut edge_nodes = BTreeMap::new();
    for (p, c) in d.tree_edges() {
        let mut mid = format!("{p}>{c}");
        while taken.contains(&mid) || bags.contains_key(&mid) {
            mid.push('\'');
        }
        bags.insert(mid.clone(), d.bag(&p)?.intersection(d.bag(&c)?).cloned().collect());
        edges.push((p.clone(), mid.clone()));
        edges.push((mid.clone(), c.clone()));
        edge_nodes.insert(mid, c);
    }
    let mut new_root = "root".to_string();
    while taken.contains(&new_root) || bags.contains_key(&new_root) {
        new_root.push('\'');
    }
    bags.insert(new_root.clone(), s.gamma0.vertices.iter().cloned().collect());
    edges.push((new_root.clone(), d.root().to_string()));
    let decomp = RootedDecomposition::new(new_root.clone(), bags, &edges)?;
    if let Err(v) = crate::decomp::validate(&s.graph, &decomp) {
        return Err(Error::Internal(format!("realizer is not a decomposition: {v:?}")));
    }
    Ok(NodeRealizer {
        decomp,
        alpha: ad.alpha.clone(),
        edge_nodes,
        new_root,
    })
}

/// Γ-elevation of the node-realizer: strip elevation where the cut test asks
/// whether a subdivision node's branch march carries only essential numbers
/// 0 and 1 outside Z.
pub fn gamma_elevation(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    realizer: &NodeRealizer,
    host_limit: usize,
) -> Result<usize> {
    // Subdivision nodes use the essential-number test of their head's branch
    // march; every other node keeps the plain pointedness test. The two tests
    // agree on subdivision nodes when Gamma and the root march are empty.
    let cut = |t: &str, z: &VertexSet| -> Result<bool> {
        let Some(head) = realizer.edge_nodes.get(t) else {
            return crate::strips::node_is_pseudo_edge_cut(&s.graph, &realizer.decomp, t, z);
        };
        let p = ad.decomp.parent_of(head).unwrap().clone();
        let shared: VertexSet = ad
            .decomp
            .bag(head)?
            .intersection(ad.decomp.bag(&p)?)
            .cloned()
            .collect();
        for v in &shared {
            if z.contains(v) {
                continue;
            }
            if essential_number(s, ad, head, v)? == 2 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let report = depth_and_elevation_with(&s.graph, &realizer.decomp, host_limit, &cut)?;
    Ok(report.elevation)
}

/// The unimpeded condition: every descending chain of N+1 tree edges with
/// pairwise distinct equal-size adhesion sets, none undercut along the way,
/// admits a full disjoint path system between the first two adhesion sets.
pub fn is_n_unimpeded(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    n_param: usize,
    host_limit: usize,
) -> Result<bool> {
    if s.graph.n() > host_limit {
        return Err(Error::SizeGuard {
            what: "unimpeded check",
            size: s.graph.n(),
            limit: host_limit,
        });
    }
    let d = &ad.decomp;
    let tree_edges = d.tree_edges();
    let adhesion = |e: &(String, String)| -> VertexSet {
        d.bag(&e.0)
            .unwrap()
            .intersection(d.bag(&e.1).unwrap())
            .cloned()
            .collect()
    };
    // chains of N+1 edges along a root-to-leaf path
    fn chains(
        d: &RootedDecomposition,
        tree_edges: &[(String, String)],
        need: usize,
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chain.len() == need {
            out.push(chain.clone());
            return;
        }
        for (i, (p, _)) in tree_edges.iter().enumerate() {
            let ok = match chain.last() {
                None => true,
                Some(&j) => {
                    let (_, prev_child) = &tree_edges[j];
                    d.is_ancestor(prev_child, p).unwrap()
                }
            };
            if ok {
                chain.push(i);
                chains(d, tree_edges, need, chain, out);
                chain.pop();
            }
        }
    }
    let mut all = Vec::new();
    chains(d, &tree_edges, n_param + 1, &mut Vec::new(), &mut all);
    'chain: for chain in all {
        let sets: Vec<VertexSet> = chain.iter().map(|&i| adhesion(&tree_edges[i])).collect();
        let k = sets[0].len();
        if sets.iter().any(|x| x.len() != k) {
            continue;
        }
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                if sets[i] == sets[j] {
                    continue 'chain;
                }
            }
        }
        // every edge separating the chain's ends has a large enough adhesion
        let s1 = &tree_edges[chain[0]].0;
        let t_last = &tree_edges[*chain.last().unwrap()].1;
        let path: BTreeSet<String> = d.tree_path(s1, t_last)?.into_iter().collect();
        let undercut = tree_edges.iter().any(|(p, c)| {
            path.contains(p) && path.contains(c) && adhesion(&(p.clone(), c.clone())).len() < k
        });
        if undercut {
            continue;
        }
        let sys = max_disjoint_paths(&s.graph, &sets[0], &sets[1])?;
        if sys.len() < k {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct AssemblageReport {
    pub unimpeded: usize,
    pub gamma_elevation: usize,
    pub plain_elevation: usize,
}

/// Wraps a linked, nested decomposition of a plain graph as the trivial
/// assemblage, asserting the unimpeded bound and the elevation agreement.
pub fn graph_as_assemblage(
    g: &crate::graph::Multigraph,
    decomp: &RootedDecomposition,
    w: usize,
    n_param: usize,
    host_limit: usize,
) -> Result<(QAssemblage, AnchoredDecomposition, AssemblageReport)> {
    if !crate::refine::is_n_linked(g, decomp, n_param)? {
        return Err(Error::Precondition("decomposition is not linked for the given N".into()));
    }
    let m = metrics(decomp);
    if m.width > w as i64 {
        return Err(Error::Precondition(format!("width {} exceeds {w}", m.width)));
    }
    if !m.nested_edges {
        return Err(Error::Precondition("decomposition edges must be nested".into()));
    }
    let s = QAssemblage {
        graph: g.clone(),
        gamma0: March::empty(),
        gammas: Vec::new(),
        f: Vec::new(),
        phi: g
            .vertices()
            .iter()
            .map(|v| (v.clone(), crate::assemblage::Label::base("*")))
            .collect(),
        order: FiniteQuasiOrder::trivial(),
    };
    let ad = AnchoredDecomposition {
        decomp: decomp.clone(),
        alpha: Vec::new(),
    };
    ad.validate(&s)?;
    if !is_n_unimpeded(&s, &ad, 2 * n_param, host_limit)? {
        return Err(Error::Internal("expected the decomposition to be 2N-unimpeded".into()));
    }
    let realizer = node_realizer(&s, &ad)?;
    let ge = gamma_elevation(&s, &ad, &realizer, host_limit)?;
    let plain = crate::strips::depth_and_elevation(g, decomp, host_limit)?.elevation;
    if ge != plain {
        return Err(Error::Internal(format!(
            "realizer ∅-elevation {ge} differs from the decomposition elevation {plain}"
        )));
    }
    Ok((
        s,
        ad,
        AssemblageReport {
            unimpeded: 2 * n_param,
            gamma_elevation: ge,
            plain_elevation: plain,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct DecorationReport {
    pub choppers: Vec<String>,
    pub levels: BTreeMap<String, u32>,
    /// ordering of each realizer node's bag, as threaded along path systems
    pub orderings: BTreeMap<String, Vec<String>>,
    /// branch march per non-root original node, under the threaded orderings
    pub gammas: BTreeMap<String, March>,
    pub n_prime: u32,
}

pub fn n_prime_bound(h: usize, n_param: usize) -> u32 {
    let three_h = 3usize.pow(h as u32);
    ((three_h * (h + 1) * (h + 1) + 2) * (n_param + 1)) as u32
}

/// Extracts the decorated tree of an unimpeded anchored decomposition:
/// choppers and levels on the node-realizer, orderings threaded along
/// disjoint path systems, ψ the adhesion sets and τ the chopper/essential-2
/// rule. The decoration bound and validity are asserted.
pub fn decoration_from_decomposition(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    n_param: usize,
    h: usize,
    d_param: usize,
    host_limit: usize,
) -> Result<(DecoratedTree, DecorationReport)> {
    ad.validate(s)?;
    if !is_n_unimpeded(s, ad, n_param, host_limit)? {
        return Err(Error::Precondition("anchored decomposition is not unimpeded for N".into()));
    }
    let m = metrics(&ad.decomp);
    if m.adhesion > h {
        return Err(Error::Precondition(format!("adhesion {} exceeds h = {h}", m.adhesion)));
    }
    let realizer = node_realizer(s, ad)?;
    let ge = gamma_elevation(s, ad, &realizer, host_limit)?;
    if ge > d_param {
        return Err(Error::Precondition(format!("Γ-elevation {ge} exceeds d = {d_param}")));
    }
    let r = &realizer.decomp;
    let rg = &s.graph;

    // closest precursor per node of the realizer
    let mut nodes: Vec<String> = r.nodes().cloned().collect();
    nodes.sort_by_key(|t| (r.depth_of(t).unwrap(), t.clone()));
    let closest_precursor = |t: &str| -> Result<Option<String>> {
        let mut best: Option<(usize, String)> = None;
        for p in r.nodes() {
            if is_precursor(r, p, t)? {
                let dep = r.depth_of(p)?;
                if best.as_ref().map_or(true, |(bd, _)| dep > *bd) {
                    best = Some((dep, p.clone()));
                }
            }
        }
        Ok(best.map(|(_, p)| p))
    };
    let mut precursor: BTreeMap<String, Option<String>> = BTreeMap::new();
    for t in &nodes {
        precursor.insert(t.clone(), closest_precursor(t)?);
    }
    // choppers
    let mut chopper: BTreeMap<String, bool> = BTreeMap::new();
    for t in &nodes {
        let is_chop = match &precursor[t] {
            None => true,
            Some(p) => {
                let need = r.bag(t)?.len();
                max_disjoint_paths(rg, r.bag(p)?, r.bag(t)?)?.len() < need
            }
        };
        chopper.insert(t.clone(), is_chop);
    }
    // levels, in breadth-first (depth) order
    let outside_count = |t: &str, v: &str| -> Result<usize> {
        let ud = up_down(r, t)?;
        let mut cnt = s
            .graph
            .edges()
            .iter()
            .filter(|(x, y)| {
                (x == v && !ud.up.contains(y) && x != y) || (y == v && !ud.up.contains(x) && x != y)
            })
            .count();
        if let Some(i) = s.gamma0.position(v) {
            cnt += s.gamma0.ess[i] as usize;
        }
        Ok(cnt)
    };
    let anchored_outside = |t: &str, v: &str| -> Result<bool> {
        for (m, a) in s.gammas.iter().zip(&ad.alpha) {
            if m.vertices.iter().any(|x| x == v) && !r.is_ancestor(t, a)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let mut level: BTreeMap<String, u32> = BTreeMap::new();
    for t in &nodes {
        let lvl = match &precursor[t] {
            None => 0,
            Some(p) => {
                if chopper[t] {
                    level[p] + 1
                } else {
                    // nearest chopper up the precursor chain
                    let mut anc = p.clone();
                    loop {
                        if chopper[&anc] {
                            break;
                        }
                        anc = precursor[&anc]
                            .clone()
                            .ok_or_else(|| Error::Internal("precursor chain without chopper".into()))?;
                    }
                    let tpp: VertexSet = r.bag(t)?.intersection(r.bag(&anc)?).cloned().collect();
                    let ppp: VertexSet = r.bag(p)?.intersection(r.bag(&anc)?).cloned().collect();
                    let mut same = tpp == ppp;
                    if same {
                        for v in &tpp {
                            if anchored_outside(t, v)? && !anchored_outside(p, v)? {
                                same = false;
                                break;
                            }
                            let a = outside_count(t, v)?;
                            let b = outside_count(p, v)?;
                            if !((a >= 2 && b >= 2) || (a == b && a <= 1)) {
                                same = false;
                                break;
                            }
                        }
                    }
                    if same {
                        level[p]
                    } else {
                        level[p] + 1
                    }
                }
            }
        };
        level.insert(t.clone(), lvl);
    }
    let n_prime = n_prime_bound(h, n_param);
    if let Some((t, l)) = level.iter().find(|(_, &l)| l > n_prime) {
        return Err(Error::Internal(format!(
            "level {l} at `{t}` exceeds the bound {n_prime}; this should be impossible"
        )));
    }
    // orderings threaded along disjoint path systems
    let mut pi: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for t in &nodes {
        let bag: Vec<String> = r.bag(t)?.iter().cloned().collect();
        let ord = if t == &realizer.new_root {
            s.gamma0.vertices.clone()
        } else if chopper[t] {
            bag
        } else {
            let p = precursor[t].clone().unwrap();
            let sys = max_disjoint_paths(rg, r.bag(&p)?, r.bag(t)?)?;
            let mut out = Vec::new();
            for v in &pi[&p] {
                let path = sys
                    .paths
                    .iter()
                    .find(|path| path.first() == Some(v))
                    .ok_or_else(|| Error::Internal("threading lost a path".into()))?;
                out.push(path.last().unwrap().clone());
            }
            out
        };
        pi.insert(t.clone(), ord);
    }
    // decoration over the original tree
    let d0 = &ad.decomp;
    let mut phi = BTreeMap::new();
    let mut tau = BTreeMap::new();
    let mut mu = BTreeMap::new();
    let mut gammas = BTreeMap::new();
    for (p, c) in d0.tree_edges() {
        let mid = realizer
            .edge_nodes
            .iter()
            .find(|(_, head)| **head == c)
            .map(|(m, _)| m.clone())
            .ok_or_else(|| Error::Internal("missing subdivision node".into()))?;
        let psi: crate::decorated::LabelSet = d0
            .bag(&p)?
            .intersection(d0.bag(&c)?)
            .cloned()
            .collect();
        let branch = branch_at(s, ad, &c, &pi[&mid])?;
        let t_set: crate::decorated::LabelSet = if chopper[&mid] {
            psi.clone()
        } else {
            branch
                .gamma0
                .vertices
                .iter()
                .zip(&branch.gamma0.ess)
                .filter(|(_, &e)| e == 2)
                .map(|(v, _)| v.clone())
                .collect()
        };
        phi.insert(c.clone(), psi);
        tau.insert(c.clone(), t_set);
        mu.insert(c.clone(), level[&mid]);
        gammas.insert(c.clone(), branch.gamma0.clone());
    }
    let tree = DecoratedTree::new(
        d0.root().to_string(),
        &d0.tree_edges(),
        phi,
        tau,
        mu,
        h,
        d_param + 1,
        n_prime,
    )?;
    if let Err(v) = crate::decorated::is_decorated(&tree)? {
        return Err(Error::Internal(format!(
            "extracted decoration fails validity: {v:?}"
        )));
    }
    let choppers = nodes.iter().filter(|t| chopper[*t]).cloned().collect();
    Ok((
        tree,
        DecorationReport {
            choppers,
            levels: level,
            orderings: pi,
            gammas,
            n_prime,
        },
    ))
}


#[cfg(test)]
mod precondition_tests {
    use super::*;
    use crate::graph::graph_of;

    #[test]
    fn graph_as_assemblage_rejects_non_nested() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let d = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        let err = graph_as_assemblage(&g, &d, 3, 1, 14);
        assert!(matches!(err, Err(crate::error::Error::Precondition(_))));
    }
}
