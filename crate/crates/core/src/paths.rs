//! Disjoint path systems and edge-connectivity tests.
//!
//! Vertex-disjoint path systems are computed by unit-capacity vertex-splitting
//! maximum flow, so their cardinality equals the minimum order of a separation
//! covering the two endpoint sets. A vertex lying in both endpoint sets counts
//! as a zero-edge path.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};

/// A system of pairwise vertex-disjoint paths between two endpoint sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    pub paths: Vec<Vec<String>>,
    pub from: VertexSet,
    pub to: VertexSet,
}

impl PathSystem {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn vertices(&self) -> VertexSet {
        self.paths.iter().flatten().cloned().collect()
    }

    /// Re-checks every invariant against the host graph.
    pub fn verify(&self, g: &Multigraph) -> Result<()> {
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        for p in &self.paths {
            if p.is_empty() {
                return Err(Error::Internal("empty path in system".into()));
            }
            if !self.from.contains(&p[0]) || !self.to.contains(p.last().unwrap()) {
                return Err(Error::Internal("path endpoints outside endpoint sets".into()));
            }
            for v in p {
                if !seen.insert(v) {
                    return Err(Error::Internal(format!("vertex `{v}` reused across paths")));
                }
            }
            for w in p.windows(2) {
                let has = g
                    .edges()
                    .iter()
                    .any(|(a, b)| (a == &w[0] && b == &w[1]) || (a == &w[1] && b == &w[0]));
                if !has {
                    return Err(Error::Internal(format!("missing host edge {}-{}", w[0], w[1])));
                }
            }
        }
        Ok(())
    }
}

struct FlowNet {
    // arcs: to, cap, flow; adjacency by arc index, reverse arc is idx ^ 1
    to: Vec<usize>,
    cap: Vec<i32>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn arc(&mut self, u: usize, v: usize, c: i32) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// BFS augmenting paths; deterministic because arcs are added in
    /// canonical order.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let n = self.adj.len();
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<usize>> = vec![None; n];
            let mut q = std::collections::VecDeque::new();
            q.push_back(s);
            let mut found = false;
            'bfs: while let Some(u) = q.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && prev[v].is_none() && v != s {
                        prev[v] = Some(a);
                        if v == t {
                            found = true;
                            break 'bfs;
                        }
                        q.push_back(v);
                    }
                }
            }
            if !found {
                return total;
            }
            let mut v = t;
            while v != s {
                let a = prev[v].unwrap();
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.to[a ^ 1];
            }
            total += 1;
        }
    }
}

/// Maximum-cardinality system of pairwise vertex-disjoint `x`–`y` paths.
/// A vertex in both sets becomes a one-vertex path.
pub fn max_disjoint_paths(g: &Multigraph, x: &VertexSet, y: &VertexSet) -> Result<PathSystem> {
    for v in x.iter().chain(y.iter()) {
        g.vertex_index(v)?;
    }
    let view = g.view();
    let n = view.n;
    // nodes: 2n split vertices, source 2n, sink 2n+1
    let vin = |i: usize| 2 * i;
    let vout = |i: usize| 2 * i + 1;
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNet::new(2 * n + 2);
    for i in 0..n {
        net.arc(vin(i), vout(i), 1);
    }
    for &(u, v) in &view.edges {
        if u == v {
            continue;
        }
        net.arc(vout(u), vin(v), 1);
        net.arc(vout(v), vin(u), 1);
    }
    let xm: Vec<usize> = x.iter().map(|v| g.vertex_index(v).unwrap()).collect();
    let ym: Vec<usize> = y.iter().map(|v| g.vertex_index(v).unwrap()).collect();
    for &i in &xm {
        net.arc(s, vin(i), 1);
    }
    for &i in &ym {
        net.arc(vout(i), t, 1);
    }
    let value = net.max_flow(s, t);

    // Decompose the flow into paths: walk saturated arcs from each x vertex.
    let mut used_arc = vec![false; net.to.len()];
    let mut paths = Vec::new();
    for &start in &xm {
        // source arc to start saturated?
        let sat = net.adj[s]
            .iter()
            .any(|&a| a % 2 == 0 && net.to[a] == vin(start) && net.cap[a] == 0);
        if !sat {
            continue;
        }
        let mut path = vec![start];
        let mut cur = start;
        loop {
            // inside cur: vin->vout must be saturated
            if ym.contains(&cur) {
                // does the flow leave through the sink here?
                let to_sink = net.adj[vout(cur)]
                    .iter()
                    .any(|&a| a % 2 == 0 && net.to[a] == t && net.cap[a] == 0 && !used_arc[a]);
                if to_sink {
                    break;
                }
            }
            let mut next = None;
            for &a in &net.adj[vout(cur)] {
                if a % 2 == 0 && net.cap[a] == 0 && !used_arc[a] {
                    let w = net.to[a];
                    if w == t {
                        continue;
                    }
                    used_arc[a] = true;
                    next = Some(w / 2);
                    break;
                }
            }
            match next {
                Some(w) => {
                    path.push(w);
                    cur = w;
                }
                None => break,
            }
        }
        paths.push(path.into_iter().map(|i| g.name_of(i).to_string()).collect::<Vec<_>>());
    }
    debug_assert_eq!(paths.len(), value);
    let sys = PathSystem {
        paths,
        from: x.clone(),
        to: y.clone(),
    };
    sys.verify(g)?;
    Ok(sys)
}

/// True iff two edge-disjoint `u`–`v` paths exist whose internal vertices
/// avoid `avoid_internal`.
pub fn two_edge_disjoint_paths(g: &Multigraph, u: &str, v: &str, avoid_internal: &VertexSet) -> Result<bool> {
    let ui = g.vertex_index(u)?;
    g.vertex_index(v)?;
    if avoid_internal.contains(u) || avoid_internal.contains(v) {
        return Err(Error::Precondition(
            "endpoints must not be in the avoided internal set".into(),
        ));
    }
    if u == v {
        // two edge-disjoint closed walks are not meaningful here; a loop at u
        // yields a trivial pair only if two loops exist
        let loops = g.edges().iter().filter(|(a, b)| a == u && b == u).count();
        let _ = ui;
        return Ok(loops >= 2);
    }
    let keep: VertexSet = g
        .vertices()
        .iter()
        .filter(|w| !avoid_internal.contains(*w) || *w == u || *w == v)
        .cloned()
        .collect();
    let h = g.induced(&keep);
    let view = h.view();
    let ui = h.vertex_index(u)?;
    let vi = h.vertex_index(v)?;
    let mut net = FlowNet::new(view.n);
    for &(a, b) in &view.edges {
        if a == b {
            continue;
        }
        net.arc(a, b, 1);
        net.arc(b, a, 1);
    }
    Ok(net.max_flow(ui, vi) >= 2)
}

struct LinkageSearch<'a> {
    view: &'a crate::graph::GraphView,
    pairs: &'a [(usize, usize)],
    endpoint_of: Vec<Option<usize>>,
    used: Vec<bool>,
    acc: Vec<Vec<usize>>,
}

impl LinkageSearch<'_> {
    fn solve(&mut self, k: usize) -> bool {
        if k == self.pairs.len() {
            return true;
        }
        let (a, b) = self.pairs[k];
        debug_assert!(!self.used[a] && !self.used[b]);
        self.used[a] = true;
        let mut cur = vec![a];
        let ok = self.dfs(k, b, &mut cur);
        if !ok {
            self.used[a] = false;
        }
        ok
    }

    fn dfs(&mut self, k: usize, goal: usize, cur: &mut Vec<usize>) -> bool {
        let at = *cur.last().unwrap();
        if at == goal {
            self.acc.push(cur.clone());
            if self.solve(k + 1) {
                return true;
            }
            self.acc.pop();
            return false;
        }
        for i in 0..self.view.adj[at].len() {
            let (w, _) = self.view.adj[at][i];
            if w == at || self.used[w] {
                continue;
            }
            // internal vertices stay off every other pair's endpoints
            if w != goal && self.endpoint_of[w].is_some() {
                continue;
            }
            self.used[w] = true;
            cur.push(w);
            if self.dfs(k, goal, cur) {
                return true;
            }
            cur.pop();
            self.used[w] = false;
        }
        false
    }
}

/// Searches for pairwise vertex-disjoint paths linking each given endpoint
/// pair, by exhaustive backtracking. A pair with equal ends is a one-vertex
/// path. Desk-scale only.
pub fn disjoint_linkage(g: &Multigraph, pairs: &[(String, String)]) -> Result<Option<Vec<Vec<String>>>> {
    let view = g.view();
    let mut idx_pairs = Vec::new();
    for (a, b) in pairs {
        idx_pairs.push((g.vertex_index(a)?, g.vertex_index(b)?));
    }
    // endpoints of distinct pairs must be distinct for any linkage to exist
    let mut endpoint_of: Vec<Option<usize>> = vec![None; view.n];
    for (k, &(a, b)) in idx_pairs.iter().enumerate() {
        for v in if a == b { vec![a] } else { vec![a, b] } {
            if endpoint_of[v].is_some() {
                return Ok(None);
            }
            endpoint_of[v] = Some(k);
        }
    }
    let mut search = LinkageSearch {
        view: &view,
        pairs: &idx_pairs,
        endpoint_of,
        used: vec![false; view.n],
        acc: Vec::new(),
    };
    if !search.solve(0) {
        return Ok(None);
    }
    Ok(Some(
        search
            .acc
            .into_iter()
            .map(|p| p.into_iter().map(|i| g.name_of(i).to_string()).collect())
            .collect(),
    ))
}
