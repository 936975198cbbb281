//! Vertex-labelled multigraphs with parallel edges and loops.
//!
//! Vertices are opaque strings kept in ascending order; all algorithms use
//! that order for deterministic tie-breaking.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexSet = BTreeSet<String>;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<String, String>>,
}

/// A finite multigraph. Parallel edges and loops are allowed; the edge list
/// keeps parse order, while the canonical form sorts everything.
#[derive(Debug, Clone)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    labels: Option<BTreeMap<String, String>>,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.sorted_edges() == other.sorted_edges()
            && self.labels == other.labels
    }
}
impl Eq for Multigraph {}

impl Multigraph {
    pub fn new<I, J>(vertices: I, edges: J) -> Result<Self>
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = (String, String)>,
    {
        let vset: BTreeSet<String> = vertices.into_iter().collect();
        let vertices: Vec<String> = vset.into_iter().collect();
        let edges: Vec<(String, String)> = edges.into_iter().collect();
        let g = Multigraph {
            vertices,
            edges,
            labels: None,
        };
        g.check()?;
        Ok(g)
    }

    pub fn with_labels(mut self, labels: BTreeMap<String, String>) -> Result<Self> {
        self.labels = Some(labels);
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        for (u, v) in &self.edges {
            for w in [u, v] {
                if self.vertices.binary_search(w).is_err() {
                    return Err(Error::UnknownVertex(w.clone()));
                }
            }
        }
        if let Some(labels) = &self.labels {
            for v in &self.vertices {
                if !labels.contains_key(v) {
                    return Err(Error::Parse(format!(
                        "label map misses vertex `{v}` (labels must cover every vertex or none)"
                    )));
                }
            }
            for v in labels.keys() {
                if self.vertices.binary_search(v).is_err() {
                    return Err(Error::UnknownVertex(v.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        let vset: BTreeSet<String> = doc.vertices.iter().cloned().collect();
        if vset.len() != doc.vertices.len() {
            return Err(Error::Parse("duplicate vertex identifier".into()));
        }
        let g = Multigraph {
            vertices: vset.into_iter().collect(),
            edges: doc.edges,
            labels: doc.labels,
        };
        g.check()?;
        Ok(g)
    }

    fn sorted_edges(&self) -> Vec<(String, String)> {
        let mut es: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|(u, v)| {
                if u <= v {
                    (u.clone(), v.clone())
                } else {
                    (v.clone(), u.clone())
                }
            })
            .collect();
        es.sort();
        es
    }

    /// Canonical JSON: vertices ascending, each edge pair sorted, edge list
    /// lexicographically sorted.
    pub fn serialize(&self) -> String {
        let doc = GraphDoc {
            vertices: self.vertices.clone(),
            edges: self.sorted_edges(),
            labels: self.labels.clone(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&BTreeMap<String, String>> {
        self.labels.as_ref()
    }

    pub fn label_of(&self, v: &str) -> Option<&str> {
        self.labels.as_ref().and_then(|m| m.get(v)).map(|s| s.as_str())
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.binary_search_by(|x| x.as_str().cmp(v)).is_ok()
    }

    pub fn vertex_index(&self, v: &str) -> Result<usize> {
        self.vertices
            .binary_search_by(|x| x.as_str().cmp(v))
            .map_err(|_| Error::UnknownVertex(v.to_string()))
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().cloned().collect()
    }

    /// Number of edges incident with `v`, loops counted twice.
    pub fn degree(&self, v: &str) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Subgraph induced by `keep`: all kept vertices plus every edge with
    /// both ends kept. Labels are restricted when present.
    pub fn induced(&self, keep: &VertexSet) -> Multigraph {
        let vertices: Vec<String> = self.vertices.iter().filter(|v| keep.contains(*v)).cloned().collect();
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .cloned()
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|m| m.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect());
        Multigraph {
            vertices,
            edges,
            labels,
        }
    }

    /// Subgraph with the given vertices removed.
    pub fn without(&self, remove: &VertexSet) -> Multigraph {
        let keep: VertexSet = self.vertices.iter().filter(|v| !remove.contains(*v)).cloned().collect();
        self.induced(&keep)
    }

    /// Union of two subgraphs of a common host (vertex and edge multiset union
    /// is not needed here: both arguments are edge-disjoint subgraphs).
    pub fn union(&self, other: &Multigraph) -> Multigraph {
        let mut vset: BTreeSet<String> = self.vertices.iter().cloned().collect();
        vset.extend(other.vertices.iter().cloned());
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().cloned());
        Multigraph {
            vertices: vset.into_iter().collect(),
            edges,
            labels: None,
        }
    }

    pub fn view(&self) -> GraphView {
        let n = self.vertices.len();
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut adj = vec![Vec::new(); n];
        for (id, (u, v)) in self.edges.iter().enumerate() {
            let ui = self.vertex_index(u).expect("checked edge endpoint");
            let vi = self.vertex_index(v).expect("checked edge endpoint");
            edges.push((ui.min(vi), ui.max(vi)));
            adj[ui].push((vi, id));
            if ui != vi {
                adj[vi].push((ui, id));
            }
        }
        for a in &mut adj {
            a.sort();
        }
        GraphView { n, edges, adj }
    }

    pub fn name_of(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn to_mask(&self, set: &VertexSet) -> Result<u64> {
        if self.n() > 64 {
            return Err(Error::SizeGuard {
                what: "bitset vertex sets",
                size: self.n(),
                limit: 64,
            });
        }
        let mut mask = 0u64;
        for v in set {
            mask |= 1u64 << self.vertex_index(v)?;
        }
        Ok(mask)
    }

    pub fn from_mask(&self, mask: u64) -> VertexSet {
        let mut out = VertexSet::new();
        for i in 0..self.n() {
            if mask & (1 << i) != 0 {
                out.insert(self.vertices[i].clone());
            }
        }
        out
    }

    /// Connected components as vertex sets, in canonical order.
    pub fn components(&self) -> Vec<VertexSet> {
        let view = self.view();
        let mut seen = vec![false; view.n];
        let mut out = Vec::new();
        for s in 0..view.n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(w, _) in &view.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(comp.into_iter().map(|i| self.vertices[i].clone()).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Index-based view of a multigraph used by the algorithms. Edge ids index
/// the host's edge list; adjacency lists are sorted for determinism.
#[derive(Debug, Clone)]
pub struct GraphView {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl GraphView {
    /// Number of non-loop edges from `v` into `targets` (a bitmask), with
    /// multiplicity. Loops at `v` count toward neither side.
    pub fn edges_into(&self, v: usize, targets: u64) -> usize {
        self.adj[v]
            .iter()
            .filter(|&&(w, _)| w != v && targets & (1 << w) != 0)
            .count()
    }

    /// Components of the subgraph induced by `mask`, as bitmasks, canonical order.
    pub fn components_within(&self, mask: u64) -> Vec<u64> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for s in 0..self.n {
            let bit = 1u64 << s;
            if mask & bit == 0 || seen & bit != 0 {
                continue;
            }
            let mut comp = bit;
            let mut stack = vec![s];
            seen |= bit;
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adj[u] {
                    let wb = 1u64 << w;
                    if mask & wb != 0 && seen & wb == 0 {
                        seen |= wb;
                        comp |= wb;
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Like `components_within`, but also forbids crossing the edges in
    /// `banned_edges` (by edge id).
    pub fn components_within_banned(&self, mask: u64, banned_edges: &BTreeSet<usize>) -> Vec<u64> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for s in 0..self.n {
            let bit = 1u64 << s;
            if mask & bit == 0 || seen & bit != 0 {
                continue;
            }
            let mut comp = bit;
            let mut stack = vec![s];
            seen |= bit;
            while let Some(u) = stack.pop() {
                for &(w, id) in &self.adj[u] {
                    if banned_edges.contains(&id) {
                        continue;
                    }
                    let wb = 1u64 << w;
                    if mask & wb != 0 && seen & wb == 0 {
                        seen |= wb;
                        comp |= wb;
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

impl Serialize for Multigraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = GraphDoc {
            vertices: self.vertices.clone(),
            edges: self.sorted_edges(),
            labels: self.labels.clone(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multigraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = GraphDoc::deserialize(deserializer)?;
        let g = Multigraph {
            vertices: {
                let vset: BTreeSet<String> = doc.vertices.into_iter().collect();
                vset.into_iter().collect()
            },
            edges: doc.edges,
            labels: doc.labels,
        };
        g.check().map_err(serde::de::Error::custom)?;
        Ok(g)
    }
}

pub fn set_of<const N: usize>(items: [&str; N]) -> VertexSet {
    items.iter().map(|s| s.to_string()).collect()
}

/// Convenience constructor used across tests and generators.
pub fn graph_of(vertices: &[&str], edges: &[(&str, &str)]) -> Multigraph {
    Multigraph::new(
        vertices.iter().map(|s| s.to_string()),
        edges.iter().map(|(u, v)| (u.to_string(), v.to_string())),
    )
    .expect("well-formed literal graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_digon() {
        let g = Multigraph::parse(r#"{"vertices":["a","b"],"edges":[["a","b"],["a","b"]]}"#).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.m(), 2);
        assert_eq!(g.sorted_edges()[0], g.sorted_edges()[1]);
    }

    #[test]
    fn parse_loop_and_empty() {
        let g = Multigraph::parse(r#"{"vertices":["a"],"edges":[["a","a"]]}"#).unwrap();
        assert_eq!((g.n(), g.m()), (1, 1));
        assert_eq!(g.degree("a"), 2);
        let e = Multigraph::parse(r#"{"vertices":[],"edges":[]}"#).unwrap();
        assert_eq!((e.n(), e.m()), (0, 0));
        assert_eq!(e.serialize(), r#"{"vertices":[],"edges":[]}"#);
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let canon = r#"{"vertices":["a","b","c"],"edges":[["a","b"],["a","b"],["b","c"]]}"#;
        let g = Multigraph::parse(canon).unwrap();
        assert_eq!(g.serialize(), canon);
        // non-canonical input reparses equal
        let g2 = Multigraph::parse(r#"{"vertices":["c","b","a"],"edges":[["c","b"],["b","a"],["a","b"]]}"#).unwrap();
        assert_eq!(g, g2);
        assert_eq!(Multigraph::parse(&g2.serialize()).unwrap(), g2);
    }

    #[test]
    fn rejects_undeclared_endpoint_and_partial_labels() {
        assert!(Multigraph::parse(r#"{"vertices":["a"],"edges":[["a","b"]]}"#).is_err());
        assert!(Multigraph::parse(r#"{"vertices":["a","b"],"edges":[],"labels":{"a":"x"}}"#).is_err());
        assert!(Multigraph::parse(r#"{"vertices":["a","b"],"edges":[],"labels":{"a":"x","b":"y"}}"#).is_ok());
    }

    #[test]
    fn components_and_induced() {
        let g = graph_of(&["a", "b", "c", "d"], &[("a", "b"), ("c", "c")]);
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        let sub = g.induced(&set_of(["a", "b"]));
        assert_eq!(sub.m(), 1);
        let rm = g.without(&set_of(["a"]));
        assert_eq!(rm.n(), 3);
        assert_eq!(rm.m(), 1);
    }
}
