//! Decorated rooted trees: decoration validity, the precedes relation,
//! edge-set contractions, and the comparability-graph closure property.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type LabelSet = BTreeSet<String>;

/// A rooted tree whose edges carry label sets φ, τ ⊆ φ and counters μ,
/// subject to parameters (h, d, N). Edges are identified by their child node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedTree {
    root: String,
    parent: BTreeMap<String, String>,
    pub phi: BTreeMap<String, LabelSet>,
    pub tau: BTreeMap<String, LabelSet>,
    pub mu: BTreeMap<String, u32>,
    pub h: usize,
    pub d: usize,
    pub n_max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DecoratedDoc {
    tree: TreeDoc,
    phi: BTreeMap<String, Vec<String>>,
    tau: BTreeMap<String, Vec<String>>,
    mu: BTreeMap<String, u32>,
    h: usize,
    d: usize,
    #[serde(rename = "N")]
    n_max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TreeDoc {
    root: String,
    edges: Vec<(String, String)>,
}

impl DecoratedTree {
    pub fn new(
        root: String,
        edges: &[(String, String)],
        phi: BTreeMap<String, LabelSet>,
        tau: BTreeMap<String, LabelSet>,
        mu: BTreeMap<String, u32>,
        h: usize,
        d: usize,
        n_max: u32,
    ) -> Result<Self> {
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            if parent.insert(c.clone(), p.clone()).is_some() {
                return Err(Error::Parse(format!("node `{c}` has two parents")));
            }
        }
        if parent.contains_key(&root) {
            return Err(Error::Parse("root has a parent".into()));
        }
        let t = DecoratedTree {
            root,
            parent,
            phi,
            tau,
            mu,
            h,
            d,
            n_max,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        for c in self.parent.keys() {
            // reach the root
            let mut cur = c.clone();
            let mut steps = 0;
            while cur != self.root {
                cur = self
                    .parent
                    .get(&cur)
                    .ok_or_else(|| Error::Parse(format!("node `{c}` disconnected")))?
                    .clone();
                steps += 1;
                if steps > self.parent.len() + 1 {
                    return Err(Error::Parse("cycle in parent map".into()));
                }
            }
            let phi = self
                .phi
                .get(c)
                .ok_or_else(|| Error::Parse(format!("edge into `{c}` lacks phi")))?;
            let tau = self
                .tau
                .get(c)
                .ok_or_else(|| Error::Parse(format!("edge into `{c}` lacks tau")))?;
            let mu = self
                .mu
                .get(c)
                .ok_or_else(|| Error::Parse(format!("edge into `{c}` lacks mu")))?;
            if !tau.is_subset(phi) {
                return Err(Error::Parse(format!("tau ⊄ phi at edge into `{c}`")));
            }
            if phi.len() > self.h {
                return Err(Error::Parse(format!("|phi| exceeds h at edge into `{c}`")));
            }
            if *mu > self.n_max {
                return Err(Error::Parse(format!("mu exceeds N at edge into `{c}`")));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: DecoratedDoc = serde_json::from_str(text)?;
        let to_edge_key = |m: BTreeMap<String, Vec<String>>| -> Result<BTreeMap<String, LabelSet>> {
            let mut out = BTreeMap::new();
            for (k, v) in m {
                let child = k
                    .split_once('>')
                    .map(|(_, c)| c.to_string())
                    .ok_or_else(|| Error::Parse(format!("edge key `{k}` is not parent>child")))?;
                out.insert(child, v.into_iter().collect());
            }
            Ok(out)
        };
        let mu = doc
            .mu
            .into_iter()
            .map(|(k, v)| {
                let child = k
                    .split_once('>')
                    .map(|(_, c)| c.to_string())
                    .ok_or_else(|| Error::Parse(format!("edge key `{k}` is not parent>child")))?;
                Ok((child, v))
            })
            .collect::<Result<_>>()?;
        DecoratedTree::new(
            doc.tree.root,
            &doc.tree.edges,
            to_edge_key(doc.phi)?,
            to_edge_key(doc.tau)?,
            mu,
            doc.h,
            doc.d,
            doc.n_max,
        )
    }

    pub fn serialize(&self) -> String {
        let key = |c: &String| format!("{}>{}", self.parent[c], c);
        let doc = DecoratedDoc {
            tree: TreeDoc {
                root: self.root.clone(),
                edges: self.edges(),
            },
            phi: self.phi.iter().map(|(c, s)| (key(c), s.iter().cloned().collect())).collect(),
            tau: self.tau.iter().map(|(c, s)| (key(c), s.iter().cloned().collect())).collect(),
            mu: self.mu.iter().map(|(c, v)| (key(c), *v)).collect(),
            h: self.h,
            d: self.d,
            n_max: self.n_max,
        };
        serde_json::to_string(&doc).expect("decorated tree serialization cannot fail")
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn nodes(&self) -> Vec<String> {
        let mut out: Vec<String> = self.parent.keys().cloned().collect();
        out.push(self.root.clone());
        out.sort();
        out
    }

    pub fn parent_of(&self, v: &str) -> Option<&String> {
        self.parent.get(v)
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .parent
            .iter()
            .map(|(c, p)| (p.clone(), c.clone()))
            .collect();
        out.sort();
        out
    }

    pub fn is_ancestor(&self, a: &str, b: &str) -> bool {
        let mut cur = b.to_string();
        loop {
            if cur == a {
                return true;
            }
            match self.parent.get(&cur) {
                Some(p) => cur = p.clone(),
                None => return false,
            }
        }
    }

    /// Child-node keys of the edges on the directed path from `v` down to
    /// `w` (excluding the edge into `v` itself).
    pub fn path_edges(&self, v: &str, w: &str) -> Result<Vec<String>> {
        if !self.is_ancestor(v, w) {
            return Err(Error::Precondition(format!("`{v}` is not an ancestor of `{w}`")));
        }
        let mut out = Vec::new();
        let mut cur = w.to_string();
        while cur != v {
            out.push(cur.clone());
            cur = self.parent[&cur].clone();
        }
        out.reverse();
        Ok(out)
    }

    /// All descending chains of nodes (top, bottom) with top a strict
    /// ancestor of bottom.
    fn descending_pairs(&self) -> Vec<(String, String)> {
        let nodes = self.nodes();
        let mut out = Vec::new();
        for a in &nodes {
            for b in &nodes {
                if a != b && self.is_ancestor(a, b) {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DecorationViolation {
    TripleCoherence {
        e1: String,
        e2: String,
        e3: String,
    },
    LongConfiguration {
        path_top: String,
        path_bottom: String,
        edges: Vec<String>,
        z: Vec<String>,
    },
}

/// Checks the two decoration conditions exhaustively over directed paths.
pub fn is_decorated(t: &DecoratedTree) -> Result<std::result::Result<(), DecorationViolation>> {
    // triple coherence along root-to-leaf chains
    for (top, bottom) in t.descending_pairs() {
        let edges = t.path_edges(&top, &bottom)?;
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                for k in (j + 1)..edges.len() {
                    let pi = &t.phi[&edges[i]];
                    let pj = &t.phi[&edges[j]];
                    let pk = &t.phi[&edges[k]];
                    let inter: LabelSet = pi.intersection(pk).cloned().collect();
                    if !inter.is_subset(pj) {
                        return Ok(Err(DecorationViolation::TripleCoherence {
                            e1: edges[i].clone(),
                            e2: edges[j].clone(),
                            e3: edges[k].clone(),
                        }));
                    }
                }
            }
        }
    }
    // bounded configurations
    for (top, bottom) in t.descending_pairs() {
        let edges = t.path_edges(&top, &bottom)?;
        if edges.is_empty() {
            continue;
        }
        let min_size = edges.iter().map(|e| t.phi[e].len()).min().unwrap();
        let small: Vec<String> = edges.iter().filter(|e| t.phi[*e].len() == min_size).cloned().collect();
        if small.len() < 2 {
            continue;
        }
        let mu0 = t.mu[small[0].as_str()];
        if small.iter().any(|e| t.mu[e.as_str()] != mu0) {
            continue;
        }
        // all size-2+ subsets with constant pairwise intersection Z,
        // where every small edge has tau ⊄ Z
        let m = small.len();
        let mut best = 1usize;
        for mask in 1u64..(1 << m) {
            if (mask.count_ones() as usize) < 2 || (mask.count_ones() as usize) <= best {
                continue;
            }
            let chosen: Vec<&String> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| &small[i]).collect();
            let z: LabelSet = t.phi[chosen[0]]
                .intersection(&t.phi[chosen[1]])
                .cloned()
                .collect();
            let mut consistent = true;
            'pairs: for a in 0..chosen.len() {
                for b in (a + 1)..chosen.len() {
                    let inter: LabelSet = t.phi[chosen[a]]
                        .intersection(&t.phi[chosen[b]])
                        .cloned()
                        .collect();
                    if inter != z {
                        consistent = false;
                        break 'pairs;
                    }
                }
            }
            if !consistent {
                continue;
            }
            if small.iter().any(|e| t.tau[e.as_str()].is_subset(&z)) {
                continue;
            }
            best = mask.count_ones() as usize;
            if best > t.d {
                return Ok(Err(DecorationViolation::LongConfiguration {
                    path_top: top.clone(),
                    path_bottom: bottom.clone(),
                    edges: chosen.into_iter().cloned().collect(),
                    z: z.into_iter().collect(),
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// The precedes relation on nodes with respect to (φ, τ, μ).
pub fn precedes(t: &DecoratedTree, v: &str, w: &str) -> Result<bool> {
    if v == t.root() {
        return Ok(false);
    }
    if !t.is_ancestor(v, w) {
        return Ok(false);
    }
    if w == t.root() {
        return Ok(false);
    }
    let (e, f) = (v.to_string(), w.to_string());
    if t.phi[&e].len() != t.phi[&f].len() || t.tau[&e] != t.tau[&f] || t.mu[&e] != t.mu[&f] {
        return Ok(false);
    }
    for gedge in t.path_edges(v, w)? {
        if t.phi[&gedge].len() < t.phi[&f].len() {
            return Ok(false);
        }
        if t.phi[&gedge].len() == t.phi[&e].len() && t.mu[&gedge] < t.mu[&e] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Contracts each component of T − F into a node (components joined by
/// non-F edges collapse); the remaining edges are exactly F, keyed by the
/// surviving component roots, with the functions restricted to F.
pub fn contract(t: &DecoratedTree, f_edges: &BTreeSet<String>) -> Result<DecoratedTree> {
    for e in f_edges {
        if !t.parent_of(e).is_some() {
            return Err(Error::Precondition(format!("`{e}` is not an edge (child node)")));
        }
    }
    // component root of each node: walk up through non-F edges
    let comp_root = |v: &str| -> String {
        let mut cur = v.to_string();
        loop {
            if f_edges.contains(&cur) || t.parent_of(&cur).is_none() {
                return cur;
            }
            cur = t.parent_of(&cur).unwrap().clone();
        }
    };
    let mut edges = Vec::new();
    let mut phi = BTreeMap::new();
    let mut tau = BTreeMap::new();
    let mut mu = BTreeMap::new();
    for e in f_edges {
        let p = t.parent_of(e).unwrap();
        edges.push((comp_root(p), e.clone()));
        phi.insert(e.clone(), t.phi[e].clone());
        tau.insert(e.clone(), t.tau[e].clone());
        mu.insert(e.clone(), t.mu[e]);
    }
    DecoratedTree::new(t.root().to_string(), &edges, phi, tau, mu, t.h, t.d, t.n_max)
}

/// A finite comparability graph over the disjoint union of several trees'
/// nodes; edges join nodes of distinct trees only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparabilityGraph {
    /// adjacency over (tree index, node) pairs
    pub edges: BTreeSet<((usize, String), (usize, String))>,
}

impl ComparabilityGraph {
    pub fn new(edges: BTreeSet<((usize, String), (usize, String))>) -> Result<Self> {
        for ((i, _), (j, _)) in &edges {
            if i == j {
                return Err(Error::Precondition("edges must join distinct trees".into()));
            }
        }
        Ok(ComparabilityGraph { edges })
    }

    pub fn adjacent(&self, a: &(usize, String), b: &(usize, String)) -> bool {
        self.edges.contains(&(a.clone(), b.clone())) || self.edges.contains(&(b.clone(), a.clone()))
    }
}

/// Contraction of a comparability graph induced by per-tree edge subsets:
/// contracted nodes are adjacent iff the roots of their components were.
pub fn contract_comparability(
    dgraph: &ComparabilityGraph,
    trees: &[DecoratedTree],
    f_sets: &[BTreeSet<String>],
) -> Result<(Vec<DecoratedTree>, ComparabilityGraph)> {
    if trees.len() != f_sets.len() {
        return Err(Error::Precondition("one edge set per tree".into()));
    }
    let contracted: Vec<DecoratedTree> = trees
        .iter()
        .zip(f_sets)
        .map(|(t, f)| contract(t, f))
        .collect::<Result<_>>()?;
    let comp_root = |ti: usize, v: &str| -> String {
        let t = &trees[ti];
        let mut cur = v.to_string();
        loop {
            if f_sets[ti].contains(&cur) || t.parent_of(&cur).is_none() {
                return cur;
            }
            cur = t.parent_of(&cur).unwrap().clone();
        }
    };
    let mut edges = BTreeSet::new();
    for (ti, t) in contracted.iter().enumerate() {
        for x in t.nodes() {
            for (tj, t2) in contracted.iter().enumerate() {
                if ti >= tj {
                    continue;
                }
                for y in t2.nodes() {
                    let rx = comp_root(ti, &x);
                    let ry = comp_root(tj, &y);
                    if dgraph.adjacent(&(ti, rx), &(tj, ry)) {
                        edges.insert(((ti, x.clone()), (tj, y.clone())));
                    }
                }
            }
        }
    }
    Ok((contracted, ComparabilityGraph { edges }))
}

/// Verifies the closure hypothesis: u ~ w with v preceding w forces u ~ v.
pub fn check_closure(
    dgraph: &ComparabilityGraph,
    trees: &[DecoratedTree],
) -> Result<std::result::Result<(), ((usize, String), (usize, String), (usize, String))>> {
    for (i, ti) in trees.iter().enumerate() {
        for (ip, tip) in trees.iter().enumerate() {
            if i == ip {
                continue;
            }
            for u in ti.nodes() {
                for w in tip.nodes() {
                    if !dgraph.adjacent(&(i, u.clone()), &(ip, w.clone())) {
                        continue;
                    }
                    for v in tip.nodes() {
                        if precedes(tip, &v, &w)? && !dgraph.adjacent(&(i, u.clone()), &(ip, v.clone())) {
                            return Ok(Err(((i, u), (ip, v), (ip, w))));
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(items: &[&str]) -> LabelSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    /// A path r -> c1 -> c2 -> ... with given edge decorations.
    fn chain(decs: &[(LabelSet, LabelSet, u32)], h: usize, d: usize, n: u32) -> DecoratedTree {
        let mut edges = Vec::new();
        let mut phi = BTreeMap::new();
        let mut tau = BTreeMap::new();
        let mut mu = BTreeMap::new();
        let mut prev = "r".to_string();
        for (i, (p, t, m)) in decs.iter().enumerate() {
            let c = format!("c{i}");
            edges.push((prev.clone(), c.clone()));
            phi.insert(c.clone(), p.clone());
            tau.insert(c.clone(), t.clone());
            mu.insert(c.clone(), *m);
            prev = c;
        }
        DecoratedTree::new("r".into(), &edges, phi, tau, mu, h, d, n).unwrap()
    }

    #[test]
    fn single_edge_decorated() {
        let t = chain(&[(labels(&["a"]), labels(&["a"]), 0)], 1, 1, 0);
        assert!(is_decorated(&t).unwrap().is_ok());
    }

    #[test]
    fn disjoint_equal_constant_run_violates() {
        // d+1 = 3 edges with pairwise disjoint equal-size phi, tau = phi,
        // constant mu: Z = ∅ and the configuration has length 3 > d = 2
        let t = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["b"]), labels(&["b"]), 1),
                (labels(&["c"]), labels(&["c"]), 1),
            ],
            1,
            2,
            1,
        );
        match is_decorated(&t).unwrap() {
            Err(DecorationViolation::LongConfiguration { edges, .. }) => assert_eq!(edges.len(), 3),
            other => panic!("expected a long configuration, got {other:?}"),
        }
        // with d = 3 it passes
        let t2 = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["b"]), labels(&["b"]), 1),
                (labels(&["c"]), labels(&["c"]), 1),
            ],
            1,
            3,
            1,
        );
        assert!(is_decorated(&t2).unwrap().is_ok());
    }

    #[test]
    fn monotone_in_d() {
        let t = chain(
            &[
                (labels(&["a", "x"]), labels(&["a"]), 1),
                (labels(&["b", "x"]), labels(&["b"]), 1),
                (labels(&["c", "x"]), labels(&["x"]), 1),
            ],
            2,
            2,
            1,
        );
        if is_decorated(&t).unwrap().is_ok() {
            let mut t3 = t.clone();
            t3.d = 3;
            assert!(is_decorated(&t3).unwrap().is_ok());
        }
    }

    #[test]
    fn triple_coherence_breach() {
        let t = chain(
            &[
                (labels(&["a", "b"]), labels(&[]), 0),
                (labels(&["c"]), labels(&[]), 0),
                (labels(&["a", "d"]), labels(&[]), 0),
            ],
            2,
            5,
            0,
        );
        match is_decorated(&t).unwrap() {
            Err(DecorationViolation::TripleCoherence { .. }) => {}
            other => panic!("expected triple coherence breach, got {other:?}"),
        }
    }

    #[test]
    fn precedes_cases() {
        let t = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["a"]), labels(&["a"]), 1),
            ],
            1,
            5,
            1,
        );
        // root never precedes
        assert!(!precedes(&t, "r", "c1").unwrap());
        // reflexive on a non-root node
        assert!(precedes(&t, "c0", "c0").unwrap());
        assert!(precedes(&t, "c0", "c1").unwrap());
        // smaller-|phi| edge between kills it
        let t2 = chain(
            &[
                (labels(&["a", "b"]), labels(&["a"]), 1),
                (labels(&["z"]), labels(&["z"]), 1),
                (labels(&["a", "b"]), labels(&["a"]), 1),
            ],
            2,
            5,
            1,
        );
        assert!(!precedes(&t2, "c0", "c2").unwrap());
        // mu dip on an equal-size edge kills it
        let t3 = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["b"]), labels(&["b"]), 0),
                (labels(&["a"]), labels(&["a"]), 1),
            ],
            1,
            5,
            1,
        );
        let t3ok = precedes(&t3, "c0", "c2").unwrap();
        assert!(!t3ok);
    }

    #[test]
    fn precedes_transitive_when_stepwise() {
        let t = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["a"]), labels(&["a"]), 1),
                (labels(&["a"]), labels(&["a"]), 1),
            ],
            1,
            9,
            1,
        );
        assert!(precedes(&t, "c0", "c1").unwrap());
        assert!(precedes(&t, "c1", "c2").unwrap());
        assert!(precedes(&t, "c0", "c2").unwrap());
    }

    #[test]
    fn contraction_cases() {
        let t = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 0),
                (labels(&["b"]), labels(&["b"]), 0),
            ],
            1,
            5,
            0,
        );
        let all: BTreeSet<String> = ["c0", "c1"].iter().map(|s| s.to_string()).collect();
        let same = contract(&t, &all).unwrap();
        assert_eq!(same.nodes(), t.nodes());
        let none: BTreeSet<String> = BTreeSet::new();
        let point = contract(&t, &none).unwrap();
        assert_eq!(point.nodes(), vec!["r".to_string()]);
        assert!(point.edges().is_empty());
        let first: BTreeSet<String> = ["c0"].iter().map(|s| s.to_string()).collect();
        let half = contract(&t, &first).unwrap();
        assert_eq!(half.edges(), vec![("r".to_string(), "c0".to_string())]);
    }

    #[test]
    fn closure_check() {
        let t1 = chain(&[(labels(&["a"]), labels(&["a"]), 0)], 1, 5, 0);
        let t2 = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 0),
                (labels(&["a"]), labels(&["a"]), 0),
            ],
            1,
            5,
            0,
        );
        let trees = vec![t1, t2];
        let empty = ComparabilityGraph::new(BTreeSet::new()).unwrap();
        assert!(check_closure(&empty, &trees).unwrap().is_ok());
        // u ~ c1 but u !~ c0, and c0 precedes c1
        let mut edges = BTreeSet::new();
        edges.insert(((0usize, "c0".to_string()), (1usize, "c1".to_string())));
        let bad = ComparabilityGraph::new(edges).unwrap();
        let v = check_closure(&bad, &trees).unwrap();
        assert!(v.is_err());
        // complete bipartite is closed
        let mut full = BTreeSet::new();
        for x in trees[0].nodes() {
            for y in trees[1].nodes() {
                full.insert(((0usize, x.clone()), (1usize, y.clone())));
            }
        }
        let cb = ComparabilityGraph::new(full).unwrap();
        assert!(check_closure(&cb, &trees).unwrap().is_ok());
    }

    #[test]
    fn same_mu_contraction_preserves_precedes() {
        // W = minimum-|phi| edges, constant mu: precedes in the contraction
        // agrees with precedes between component roots
        let t = chain(
            &[
                (labels(&["a"]), labels(&["a"]), 2),
                (labels(&["b", "c"]), labels(&["b"]), 2),
                (labels(&["a"]), labels(&["a"]), 2),
            ],
            2,
            9,
            2,
        );
        let min_size = 1;
        let w: BTreeSet<String> = t
            .nodes()
            .into_iter()
            .filter(|c| t.parent_of(c).is_some() && t.phi[c].len() == min_size)
            .collect();
        let tw = contract(&t, &w).unwrap();
        for v in tw.nodes() {
            for x in tw.nodes() {
                if v == tw.root() || x == tw.root() {
                    continue;
                }
                let lhs = precedes(&tw, &v, &x).unwrap();
                let rhs = precedes(&t, &v, &x).unwrap();
                assert_eq!(lhs, rhs, "v={v} w={x}");
            }
        }
    }
}

#[cfg(test)]
mod contraction_comparability_tests {
    use super::*;

    #[test]
    fn cross_edges_follow_component_roots() {
        let mk = |n: usize| {
            let mut edges = Vec::new();
            let mut phi = BTreeMap::new();
            let mut tau = BTreeMap::new();
            let mut mu = BTreeMap::new();
            let mut prev = "r".to_string();
            for i in 0..n {
                let c = format!("c{i}");
                edges.push((prev.clone(), c.clone()));
                phi.insert(c.clone(), ["a".to_string()].into_iter().collect());
                tau.insert(c.clone(), ["a".to_string()].into_iter().collect());
                mu.insert(c.clone(), 0);
                prev = c;
            }
            DecoratedTree::new("r".into(), &edges, phi, tau, mu, 1, 9, 0).unwrap()
        };
        let trees = vec![mk(2), mk(2)];
        // cross edge between the roots of the two trees
        let mut edges = BTreeSet::new();
        edges.insert(((0usize, "r".to_string()), (1usize, "r".to_string())));
        let d = ComparabilityGraph::new(edges).unwrap();
        // contract everything below the first edge in both trees
        let f: BTreeSet<String> = ["c0".to_string()].into_iter().collect();
        let (contracted, d2) = contract_comparability(&d, &trees, &[f.clone(), f]).unwrap();
        assert_eq!(contracted[0].nodes(), vec!["c0".to_string(), "r".to_string()]);
        // r stays the root of its component, so the root pair stays adjacent
        assert!(d2.adjacent(&(0, "r".into()), &(1, "r".into())));
        // c0 heads the contracted lower component whose root c0 was not
        // adjacent before, so no new adjacency appears
        assert!(!d2.adjacent(&(0, "c0".into()), &(1, "c0".into())));
        assert!(!d2.adjacent(&(0, "r".into()), &(1, "c0".into())));
    }
}
