//! Rooted tree-decompositions: validation, metrics, node separations,
//! precursors and coherence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};
use crate::separation::{breadth_of, Separation};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DecompDoc {
    root: String,
    bags: BTreeMap<String, Vec<String>>,
    edges: Vec<(String, String)>,
}

/// A rooted tree with one bag per node. Structural invariants (the parent map
/// forms a rooted tree) are enforced at construction; the decomposition
/// axioms against a host are checked by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedDecomposition {
    root: String,
    /// child -> parent
    parent: BTreeMap<String, String>,
    bags: BTreeMap<String, VertexSet>,
}

impl Serialize for RootedDecomposition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = DecompDoc {
            root: self.root.clone(),
            bags: self
                .bags
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            edges: self.tree_edges(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootedDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = DecompDoc::deserialize(deserializer)?;
        let bags = doc
            .bags
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect();
        RootedDecomposition::new(doc.root, bags, &doc.edges).map_err(serde::de::Error::custom)
    }
}

impl RootedDecomposition {
    pub fn new(
        root: String,
        bags: BTreeMap<String, VertexSet>,
        edges: &[(String, String)],
    ) -> Result<Self> {
        if !bags.contains_key(&root) {
            return Err(Error::UnknownNode(root));
        }
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            for t in [p, c] {
                if !bags.contains_key(t) {
                    return Err(Error::UnknownNode(t.clone()));
                }
            }
            if parent.insert(c.clone(), p.clone()).is_some() {
                return Err(Error::Parse(format!("node `{c}` has two parents")));
            }
        }
        if parent.contains_key(&root) {
            return Err(Error::Parse("root has a parent".into()));
        }
        let d = RootedDecomposition { root, parent, bags };
        // connected & acyclic: every node reaches the root by parent hops
        for t in d.bags.keys() {
            let mut cur = t.clone();
            let mut steps = 0;
            while cur != d.root {
                match d.parent.get(&cur) {
                    Some(p) => cur = p.clone(),
                    None => return Err(Error::Parse(format!("node `{t}` is disconnected from the root"))),
                }
                steps += 1;
                if steps > d.bags.len() {
                    return Err(Error::Parse("parent map contains a cycle".into()));
                }
            }
        }
        Ok(d)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: DecompDoc = serde_json::from_str(text)?;
        let bags = doc
            .bags
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect();
        Self::new(doc.root, bags, &doc.edges)
    }

    pub fn serialize(&self) -> String {
        let doc = DecompDoc {
            root: self.root.clone(),
            bags: self
                .bags
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
                .collect(),
            edges: self.tree_edges(),
        };
        serde_json::to_string(&doc).expect("decomposition serialization cannot fail")
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn nodes(&self) -> impl Iterator<Item = &String> {
        self.bags.keys()
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bag(&self, t: &str) -> Result<&VertexSet> {
        self.bags.get(t).ok_or_else(|| Error::UnknownNode(t.to_string()))
    }

    pub fn bags(&self) -> &BTreeMap<String, VertexSet> {
        &self.bags
    }

    pub fn parent_of(&self, t: &str) -> Option<&String> {
        self.parent.get(t)
    }

    pub fn children_of(&self, t: &str) -> Vec<&String> {
        self.parent.iter().filter(|(_, p)| p.as_str() == t).map(|(c, _)| c).collect()
    }

    /// (parent, child) pairs in canonical order.
    pub fn tree_edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self.parent.iter().map(|(c, p)| (p.clone(), c.clone())).collect();
        out.sort();
        out
    }

    pub fn is_ancestor(&self, a: &str, b: &str) -> Result<bool> {
        self.bag(a)?;
        self.bag(b)?;
        let mut cur = b.to_string();
        loop {
            if cur == a {
                return Ok(true);
            }
            match self.parent.get(&cur) {
                Some(p) => cur = p.clone(),
                None => return Ok(false),
            }
        }
    }

    pub fn descendants(&self, t: &str) -> Result<BTreeSet<String>> {
        self.bag(t)?;
        let mut out = BTreeSet::new();
        for s in self.bags.keys() {
            if self.is_ancestor(t, s)? {
                out.insert(s.clone());
            }
        }
        Ok(out)
    }

    /// Node set of the tree path between two nodes.
    pub fn tree_path(&self, a: &str, b: &str) -> Result<Vec<String>> {
        let anc = |t: &str| -> Vec<String> {
            let mut v = vec![t.to_string()];
            let mut cur = t.to_string();
            while let Some(p) = self.parent.get(&cur) {
                v.push(p.clone());
                cur = p.clone();
            }
            v
        };
        self.bag(a)?;
        self.bag(b)?;
        let pa = anc(a);
        let pb = anc(b);
        let sb: BTreeSet<&String> = pb.iter().collect();
        // lowest common ancestor = first node of pa that is an ancestor of b
        let lca = pa
            .iter()
            .find(|t| sb.contains(t))
            .ok_or_else(|| Error::Internal("nodes share no ancestor".into()))?
            .clone();
        let mut out: Vec<String> = pa.iter().take_while(|t| **t != lca).cloned().collect();
        out.push(lca.clone());
        let mut tail: Vec<String> = pb.iter().take_while(|t| **t != lca).cloned().collect();
        tail.reverse();
        out.extend(tail);
        Ok(out)
    }

    pub fn depth_of(&self, t: &str) -> Result<usize> {
        self.bag(t)?;
        let mut d = 0;
        let mut cur = t.to_string();
        while let Some(p) = self.parent.get(&cur) {
            d += 1;
            cur = p.clone();
        }
        Ok(d)
    }

    /// Distance in the tree from `t` to the path `aTb`.
    pub fn distance_to_path(&self, t: &str, a: &str, b: &str) -> Result<usize> {
        let path: BTreeSet<String> = self.tree_path(a, b)?.into_iter().collect();
        let mut best = usize::MAX;
        for p in &path {
            let between = self.tree_path(t, p)?;
            best = best.min(between.len() - 1);
        }
        Ok(best)
    }
}

/// First failing decomposition axiom plus a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    BagNotSubset { node: String, vertex: String },
    VertexUncovered { vertex: String },
    EdgeUncovered { u: String, v: String },
    TraceDisconnected { vertex: String, node: String },
}

/// Checks the four tree-decomposition axioms, reporting the first failure in
/// axiom order with a canonical witness.
pub fn validate(g: &Multigraph, d: &RootedDecomposition) -> std::result::Result<(), Violation> {
    for (t, bag) in d.bags() {
        for v in bag {
            if !g.has_vertex(v) {
                return Err(Violation::BagNotSubset {
                    node: t.clone(),
                    vertex: v.clone(),
                });
            }
        }
    }
    let mut covered = VertexSet::new();
    for bag in d.bags().values() {
        covered.extend(bag.iter().cloned());
    }
    for v in g.vertices() {
        if !covered.contains(v) {
            return Err(Violation::VertexUncovered { vertex: v.clone() });
        }
    }
    let mut sorted_edges: Vec<(String, String)> = g
        .edges()
        .iter()
        .map(|(u, v)| if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) })
        .collect();
    sorted_edges.sort();
    for (u, v) in sorted_edges {
        if !d.bags().values().any(|bag| bag.contains(&u) && bag.contains(&v)) {
            return Err(Violation::EdgeUncovered { u, v });
        }
    }
    // connected traces: walk up from every holder; the set of holders must
    // form a subtree, i.e. every holder's parent chain stays within holders
    // until the unique shallowest holder is reached
    for v in g.vertices() {
        let holders: Vec<&String> = d.bags().iter().filter(|(_, b)| b.contains(v)).map(|(t, _)| t).collect();
        if holders.is_empty() {
            continue;
        }
        let hset: BTreeSet<&String> = holders.iter().copied().collect();
        let mut tops = Vec::new();
        for t in &holders {
            match d.parent_of(t) {
                Some(p) if hset.contains(p) => {}
                _ => tops.push((*t).clone()),
            }
        }
        if tops.len() > 1 {
            tops.sort();
            return Err(Violation::TraceDisconnected {
                vertex: v.clone(),
                node: tops[1].clone(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub width: i64,
    pub adhesion: usize,
    pub nested_edges: bool,
}

pub fn metrics(d: &RootedDecomposition) -> Metrics {
    let width = d.bags().values().map(|b| b.len() as i64).max().unwrap_or(0) - 1;
    let mut adhesion = 0;
    let mut nested = true;
    for (p, c) in d.tree_edges() {
        let bp = d.bag(&p).unwrap();
        let bc = d.bag(&c).unwrap();
        adhesion = adhesion.max(bp.intersection(bc).count());
        let pc = bp.is_subset(bc) || bc.is_subset(bp);
        nested &= pc;
    }
    Metrics {
        width,
        adhesion,
        nested_edges: nested,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpDown {
    pub up: VertexSet,
    pub down: VertexSet,
}

/// `up` = union of descendant bags of `t`; `down` = union of the bags at `t`
/// and at non-descendants. Their intersection is the bag at `t`.
pub fn up_down(d: &RootedDecomposition, t: &str) -> Result<UpDown> {
    let desc = d.descendants(t)?;
    let mut up = VertexSet::new();
    let mut down = d.bag(t)?.clone();
    for (s, bag) in d.bags() {
        if desc.contains(s) {
            up.extend(bag.iter().cloned());
        } else {
            down.extend(bag.iter().cloned());
        }
    }
    Ok(UpDown { up, down })
}

/// The separation (↓t, ↑t) given by node `t`.
pub fn separation_given_by(g: &Multigraph, d: &RootedDecomposition, t: &str) -> Result<Separation> {
    let ud = up_down(d, t)?;
    Separation::new(g, ud.down, ud.up)
}

/// `t1` is a precursor of `t2`: distinct, ancestor, equal bag sizes, and no
/// smaller bag on the connecting path.
pub fn is_precursor(d: &RootedDecomposition, t1: &str, t2: &str) -> Result<bool> {
    if t1 == t2 {
        return Ok(false);
    }
    if !d.is_ancestor(t1, t2)? {
        return Ok(false);
    }
    let k = d.bag(t1)?.len();
    if d.bag(t2)?.len() != k {
        return Ok(false);
    }
    for t in d.tree_path(t1, t2)? {
        if d.bag(&t)?.len() < k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coherence of a shared bag vertex for an ancestor/descendant node pair.
pub fn coherent_for(
    g: &Multigraph,
    d: &RootedDecomposition,
    v: &str,
    t1: &str,
    t2: &str,
) -> Result<bool> {
    if !d.is_ancestor(t1, t2)? {
        return Err(Error::Precondition(format!("`{t1}` is not an ancestor of `{t2}`")));
    }
    if !d.bag(t1)?.contains(v) || !d.bag(t2)?.contains(v) {
        return Err(Error::Precondition(format!(
            "vertex `{v}` must lie in both bags"
        )));
    }
    let s1 = separation_given_by(g, d, t1)?;
    let s2 = separation_given_by(g, d, t2)?;
    let count = |s: &Separation, into_a: bool| -> Result<usize> {
        let (_, flags) = breadth_of(g, s)?;
        let f = flags
            .iter()
            .find(|f| f.vertex == v)
            .ok_or_else(|| Error::Internal(format!("vertex `{v}` not on boundary")))?;
        Ok(if into_a { f.edges_into_a } else { f.edges_into_b })
    };
    let a1 = count(&s1, true)?;
    let a2 = count(&s2, true)?;
    let b1 = count(&s1, false)?;
    let b2 = count(&s2, false)?;
    let pointed_t1 = a1 <= 1;
    let anti_t2 = b2 <= 1;
    let first = !pointed_t1 || (a1 == a2 && a1 <= 1);
    let second = !anti_t2 || (b1 == b2 && b2 <= 1);
    Ok(first && second)
}

/// Index-based view of a decomposition over a fixed host, with per-node
/// up/down bitmasks and an ancestor table. Used by the heavier algorithms.
pub struct DecompView<'a> {
    pub g: &'a Multigraph,
    pub d: &'a RootedDecomposition,
    pub names: Vec<String>,
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<u64>,
    pub up: Vec<u64>,
    pub down: Vec<u64>,
    pub ancestor: Vec<Vec<bool>>,
}

impl<'a> DecompView<'a> {
    pub fn new(g: &'a Multigraph, d: &'a RootedDecomposition) -> Result<Self> {
        let names: Vec<String> = d.nodes().cloned().collect();
        let idx = |t: &str| names.binary_search_by(|x| x.as_str().cmp(t)).unwrap();
        let mut parent = vec![None; names.len()];
        let mut bags = vec![0u64; names.len()];
        for (i, t) in names.iter().enumerate() {
            parent[i] = d.parent_of(t).map(|p| idx(p));
            bags[i] = g.to_mask(d.bag(t)?)?;
        }
        let mut ancestor = vec![vec![false; names.len()]; names.len()];
        for (i, t) in names.iter().enumerate() {
            for (j, s) in names.iter().enumerate() {
                ancestor[i][j] = d.is_ancestor(t, s)?;
            }
        }
        let mut up = vec![0u64; names.len()];
        let mut down = vec![0u64; names.len()];
        for i in 0..names.len() {
            down[i] = bags[i];
            for j in 0..names.len() {
                if ancestor[i][j] {
                    up[i] |= bags[j];
                } else {
                    down[i] |= bags[j];
                }
            }
        }
        Ok(DecompView {
            g,
            d,
            names,
            parent,
            bags,
            up,
            down,
            ancestor,
        })
    }

    pub fn index(&self, t: &str) -> Result<usize> {
        self.names
            .binary_search_by(|x| x.as_str().cmp(t))
            .map_err(|_| Error::UnknownNode(t.to_string()))
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    /// Nodes on the tree path between two nodes, as indices.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let path = self.d.tree_path(&self.names[a], &self.names[b]).unwrap();
        path.into_iter().map(|t| self.index(&t).unwrap()).collect()
    }

    pub fn is_precursor_idx(&self, a: usize, b: usize) -> bool {
        if a == b || !self.ancestor[a][b] {
            return false;
        }
        let k = self.bags[a].count_ones();
        if self.bags[b].count_ones() != k {
            return false;
        }
        self.path_between(a, b).iter().all(|&t| self.bags[t].count_ones() >= k)
    }

    pub fn separation_idx(&self, t: usize) -> Separation {
        Separation {
            a: self.g.from_mask(self.down[t]),
            b: self.g.from_mask(self.up[t]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_of, set_of};

    fn pdecomp() -> (Multigraph, RootedDecomposition) {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let d = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        (g, d)
    }

    #[test]
    fn validate_ok_and_violations() {
        let (g, d) = pdecomp();
        assert!(validate(&g, &d).is_ok());
        let tri = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let one = RootedDecomposition::parse(r#"{"root":"t","bags":{"t":["a","b","c"]},"edges":[]}"#).unwrap();
        assert!(validate(&tri, &one).is_ok());
        let bad = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["c"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        assert_eq!(
            validate(&g, &bad),
            Err(Violation::EdgeUncovered {
                u: "b".into(),
                v: "c".into()
            })
        );
    }

    #[test]
    fn metrics_cases() {
        let (_, d) = pdecomp();
        let m = metrics(&d);
        assert_eq!((m.width, m.adhesion, m.nested_edges), (1, 1, false));
        let nested = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        assert!(metrics(&nested).nested_edges);
        let one = RootedDecomposition::parse(r#"{"root":"t","bags":{"t":["a","b","c"]},"edges":[]}"#).unwrap();
        assert_eq!(metrics(&one).width, 2);
        assert_eq!(metrics(&one).adhesion, 0);
    }

    #[test]
    fn up_down_and_separation() {
        let (g, d) = pdecomp();
        let root = up_down(&d, "t1").unwrap();
        assert_eq!(root.up, g.vertex_set());
        assert_eq!(root.down, set_of(["a", "b"]));
        let leaf = up_down(&d, "t2").unwrap();
        assert_eq!(leaf.up, set_of(["b", "c"]));
        // down includes the bag at the node itself
        assert_eq!(leaf.down, set_of(["a", "b", "c"]));
        assert_eq!(
            leaf.up.intersection(&leaf.down).cloned().collect::<VertexSet>(),
            set_of(["b", "c"])
        );
        let s = separation_given_by(&g, &d, "t2").unwrap();
        assert_eq!(s.a, set_of(["a", "b", "c"]));
        assert_eq!(s.b, set_of(["b", "c"]));
        assert_eq!(s.boundary(), *d.bag("t2").unwrap());
    }

    #[test]
    fn precursor_cases() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let d = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a"],"t2":["a","b"],"t3":["b"]},"edges":[["t1","t2"],["t2","t3"]]}"#,
        )
        .unwrap();
        let _ = g;
        assert!(!is_precursor(&d, "t1", "t1").unwrap());
        // |t1| = |t3| = 1 and the middle bag is larger: precursor holds
        assert!(is_precursor(&d, "t1", "t3").unwrap());
        assert!(!is_precursor(&d, "t2", "t3").unwrap()); // sizes differ
        let chain = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["a","b"],"t3":["a","b"]},"edges":[["t1","t2"],["t2","t3"]]}"#,
        )
        .unwrap();
        assert!(is_precursor(&chain, "t1", "t2").unwrap());
        assert!(is_precursor(&chain, "t1", "t3").unwrap());
        let dip = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["a"],"t3":["a","b"]},"edges":[["t1","t2"],["t2","t3"]]}"#,
        )
        .unwrap();
        assert!(!is_precursor(&dip, "t1", "t3").unwrap());
    }

    #[test]
    fn coherent_trivial_cases() {
        // v with zero edges on both sides at both nodes
        let g = graph_of(&["v", "x", "y"], &[("x", "y")]);
        let d = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["v","x","y"],"t2":["v","x","y"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        assert!(coherent_for(&g, &d, "v", "t1", "t2").unwrap());
    }
}
