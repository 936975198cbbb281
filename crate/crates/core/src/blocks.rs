//! Blocks, cut vertices and block trees of connected multigraphs.
//!
//! Two distinct edges lie in the same block iff some cycle contains both; a
//! loop is a block of its own on one vertex, as is an isolated vertex. Blocks
//! partition the edge set.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};

/// Block tree of a connected multigraph: a bipartite tree on cut vertices and
/// blocks, each tree edge joining a cut vertex to a block containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTree {
    /// Vertex set of each block, canonical order.
    pub blocks: Vec<VertexSet>,
    /// Edge ids (into the host edge list) of each block.
    pub block_edges: Vec<BTreeSet<usize>>,
    pub cut_vertices: VertexSet,
    /// (cut vertex, block index) adjacency.
    pub tree_edges: Vec<(String, usize)>,
}

impl BlockTree {
    pub fn index_of(&self, block: &VertexSet) -> Result<usize> {
        self.blocks
            .iter()
            .position(|b| b == block)
            .ok_or_else(|| Error::Precondition(format!("{block:?} is not a block of the graph")))
    }

    /// Block containing the given edge id.
    pub fn block_of_edge(&self, id: usize) -> Result<usize> {
        self.block_edges
            .iter()
            .position(|es| es.contains(&id))
            .ok_or_else(|| Error::Internal(format!("edge {id} in no block")))
    }
}

struct Bcc<'a> {
    view: crate::graph::GraphView,
    g: &'a Multigraph,
    disc: Vec<usize>,
    low: Vec<usize>,
    timer: usize,
    estack: Vec<usize>, // edge ids
    comps: Vec<BTreeSet<usize>>,
    is_cut: Vec<bool>,
}

impl Bcc<'_> {
    fn dfs(&mut self, u: usize, parent_edge: Option<usize>) {
        self.disc[u] = self.timer;
        self.low[u] = self.timer;
        self.timer += 1;
        let mut children = 0usize;
        for i in 0..self.view.adj[u].len() {
            let (w, id) = self.view.adj[u][i];
            if Some(id) == parent_edge {
                continue;
            }
            if w == u {
                // loop: its own block
                self.comps.push([id].into_iter().collect());
                continue;
            }
            if self.disc[w] == usize::MAX {
                self.estack.push(id);
                children += 1;
                self.dfs(w, Some(id));
                self.low[u] = self.low[u].min(self.low[w]);
                if (parent_edge.is_some() && self.low[w] >= self.disc[u])
                    || (parent_edge.is_none() && children >= 1)
                {
                    if parent_edge.is_some() && self.low[w] >= self.disc[u] {
                        self.is_cut[u] = true;
                    }
                    let mut comp = BTreeSet::new();
                    while let Some(&top) = self.estack.last() {
                        self.estack.pop();
                        comp.insert(top);
                        if top == id {
                            break;
                        }
                    }
                    self.comps.push(comp);
                }
            } else if self.disc[w] < self.disc[u] {
                self.estack.push(id);
                self.low[u] = self.low[u].min(self.disc[w]);
            }
        }
        if parent_edge.is_none() && children >= 2 {
            self.is_cut[u] = true;
        }
        let _ = self.g;
    }
}

/// Block decomposition of a connected multigraph.
pub fn block_decomposition(g: &Multigraph) -> Result<BlockTree> {
    if !g.is_connected() {
        return Err(Error::Precondition("block decomposition requires a connected graph".into()));
    }
    let view = g.view();
    let n = view.n;
    let mut bcc = Bcc {
        view,
        g,
        disc: vec![usize::MAX; n],
        low: vec![0; n],
        timer: 0,
        estack: Vec::new(),
        comps: Vec::new(),
        is_cut: vec![false; n],
    };
    if n > 0 {
        bcc.dfs(0, None);
    }
    let mut blocks: Vec<(VertexSet, BTreeSet<usize>)> = Vec::new();
    for comp in bcc.comps {
        let mut vs = VertexSet::new();
        for &id in &comp {
            let (u, v) = g.view().edges[id];
            vs.insert(g.name_of(u).to_string());
            vs.insert(g.name_of(v).to_string());
        }
        blocks.push((vs, comp));
    }
    if n == 1 && g.m() == 0 {
        blocks.push((g.vertex_set(), BTreeSet::new()));
    }
    blocks.sort_by(|a, b| {
        let ka: Vec<&String> = a.0.iter().collect();
        let kb: Vec<&String> = b.0.iter().collect();
        ka.cmp(&kb).then_with(|| a.1.cmp(&b.1))
    });
    let cut_vertices: VertexSet = (0..n)
        .filter(|&i| bcc.is_cut[i])
        .map(|i| g.name_of(i).to_string())
        .collect();
    let mut tree_edges = Vec::new();
    for (bi, (vs, _)) in blocks.iter().enumerate() {
        for c in &cut_vertices {
            if vs.contains(c) {
                tree_edges.push((c.clone(), bi));
            }
        }
    }
    tree_edges.sort();
    Ok(BlockTree {
        blocks: blocks.iter().map(|(v, _)| v.clone()).collect(),
        block_edges: blocks.into_iter().map(|(_, e)| e).collect(),
        cut_vertices,
        tree_edges,
    })
}

/// Union of the blocks on the block-tree path from `b1` to `b2` (inclusive),
/// as a subgraph of `g`.
pub fn path_of_blocks(g: &Multigraph, b1: &VertexSet, b2: &VertexSet) -> Result<Multigraph> {
    let bt = block_decomposition(g)?;
    let i1 = bt.index_of(b1)?;
    let i2 = bt.index_of(b2)?;
    let on_path = block_tree_path(&bt, i1, i2)?;
    let mut vs = VertexSet::new();
    let mut edges = Vec::new();
    for bi in on_path {
        vs.extend(bt.blocks[bi].iter().cloned());
        for &id in &bt.block_edges[bi] {
            edges.push(g.edges()[id].clone());
        }
    }
    edges.sort();
    Multigraph::new(vs.into_iter(), edges)
}

/// Block indices on the block-tree path between two blocks.
pub fn block_tree_path(bt: &BlockTree, i1: usize, i2: usize) -> Result<Vec<usize>> {
    if i1 == i2 {
        return Ok(vec![i1]);
    }
    // Bipartite tree BFS over nodes: Left(cut vertex name), Right(block idx).
    #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
    enum Node {
        Cut(String),
        Block(usize),
    }
    let mut adj: BTreeMap<Node, Vec<Node>> = BTreeMap::new();
    for (c, b) in &bt.tree_edges {
        adj.entry(Node::Cut(c.clone())).or_default().push(Node::Block(*b));
        adj.entry(Node::Block(*b)).or_default().push(Node::Cut(c.clone()));
    }
    let start = Node::Block(i1);
    let goal = Node::Block(i2);
    let mut prev: BTreeMap<Node, Node> = BTreeMap::new();
    let mut q = std::collections::VecDeque::new();
    q.push_back(start.clone());
    prev.insert(start.clone(), start.clone());
    while let Some(u) = q.pop_front() {
        if u == goal {
            break;
        }
        for w in adj.get(&u).cloned().unwrap_or_default() {
            if !prev.contains_key(&w) {
                prev.insert(w.clone(), u.clone());
                q.push_back(w);
            }
        }
    }
    if !prev.contains_key(&goal) {
        return Err(Error::Precondition("blocks lie in different components".into()));
    }
    let mut out = Vec::new();
    let mut cur = goal;
    loop {
        if let Node::Block(i) = cur {
            out.push(i);
        }
        let p = prev[&cur].clone();
        if p == cur {
            break;
        }
        cur = p;
    }
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_of, set_of};

    #[test]
    fn path_graph_blocks() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let bt = block_decomposition(&g).unwrap();
        assert_eq!(bt.blocks, vec![set_of(["a", "b"]), set_of(["b", "c"])]);
        assert_eq!(bt.cut_vertices, set_of(["b"]));
    }

    #[test]
    fn triangle_single_block() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
        let bt = block_decomposition(&g).unwrap();
        assert_eq!(bt.blocks.len(), 1);
        assert!(bt.cut_vertices.is_empty());
    }

    #[test]
    fn two_triangles_sharing_vertex() {
        let g = graph_of(
            &["a", "b", "v", "c", "d"],
            &[("a", "b"), ("a", "v"), ("b", "v"), ("c", "d"), ("c", "v"), ("d", "v")],
        );
        let bt = block_decomposition(&g).unwrap();
        assert_eq!(bt.blocks.len(), 2);
        // brute-force cut-vertex oracle: deletion increases component count
        let mut cuts = VertexSet::new();
        for v in g.vertices() {
            let h = g.without(&set_of([v.as_str()]));
            if h.components().len() > g.components().len() {
                cuts.insert(v.clone());
            }
        }
        assert_eq!(bt.cut_vertices, cuts);
        assert_eq!(bt.cut_vertices, set_of(["v"]));
    }

    #[test]
    fn digon_is_one_block_loop_is_own_block() {
        let g = graph_of(&["u", "v"], &[("u", "v"), ("u", "v")]);
        let bt = block_decomposition(&g).unwrap();
        assert_eq!(bt.blocks.len(), 1);
        let h = graph_of(&["u", "v"], &[("u", "v"), ("u", "u")]);
        let bt = block_decomposition(&h).unwrap();
        assert_eq!(bt.blocks.len(), 2);
        assert!(bt.blocks.contains(&set_of(["u"])));
    }

    #[test]
    fn blocks_partition_edges() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut tried = 0;
        while tried < 40 {
            let n = rng.gen_range(1..=7);
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i..n {
                    if rng.gen_bool(0.5) {
                        edges.push((names[i].clone(), names[j].clone()));
                    }
                    if rng.gen_bool(0.15) {
                        edges.push((names[i].clone(), names[j].clone()));
                    }
                }
            }
            let g = crate::graph::Multigraph::new(names.clone(), edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            tried += 1;
            let bt = block_decomposition(&g).unwrap();
            let mut all: Vec<usize> = bt.block_edges.iter().flatten().copied().collect();
            all.sort();
            let expect: Vec<usize> = (0..g.m()).collect();
            assert_eq!(all, expect, "every edge in exactly one block: {}", g.serialize());
        }
    }

    #[test]
    fn path_of_blocks_cases() {
        let g = graph_of(
            &["a", "b", "v", "c", "d"],
            &[("a", "b"), ("a", "v"), ("b", "v"), ("c", "d"), ("c", "v"), ("d", "v")],
        );
        let t1 = set_of(["a", "b", "v"]);
        let t2 = set_of(["c", "d", "v"]);
        let same = path_of_blocks(&g, &t1, &t1).unwrap();
        assert_eq!(same.vertex_set(), t1);
        let both = path_of_blocks(&g, &t1, &t2).unwrap();
        assert_eq!(both.vertex_set(), set_of(["a", "b", "c", "d", "v"]));
        assert_eq!(both.m(), 6);

        let p = graph_of(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]);
        let whole = path_of_blocks(&p, &set_of(["a", "b"]), &set_of(["c", "d"])).unwrap();
        assert_eq!(whole.vertex_set(), p.vertex_set());
        assert_eq!(whole.m(), 3);
    }
}
