//! Strips in rooted tree-decompositions, depth and elevation, and the
//! pseudo-edge-cut construction pipeline: foundation paths, side graphs,
//! jumps, static members, side progresses and progress shifting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::blocks::{block_decomposition, path_of_blocks};
use crate::decomp::{is_precursor, separation_given_by, up_down, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};
use crate::paths::{max_disjoint_paths, two_edge_disjoint_paths, PathSystem};
use crate::separation::{breadth_of, is_pseudo_edge_cut, Separation};

/// A chain of nodes forming a (Z,s)-strip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strip {
    pub nodes: Vec<String>,
    #[serde(rename = "Z")]
    pub z: VertexSet,
    pub s: usize,
}

impl Strip {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Pseudo-edge-cut test used by the strip machinery: given a node and Z,
/// decides whether that node's separation counts as a cut. The standard test
/// is [`node_is_pseudo_edge_cut`]; the assemblage machinery substitutes the
/// essential-number variant.
pub type CutTest<'a> = dyn Fn(&str, &VertexSet) -> Result<bool> + 'a;

pub fn node_is_pseudo_edge_cut(
    g: &Multigraph,
    d: &RootedDecomposition,
    t: &str,
    z: &VertexSet,
) -> Result<bool> {
    let sep = separation_given_by(g, d, t)?;
    is_pseudo_edge_cut(g, &sep, z)
}

/// Re-checks the five strip conditions independently.
pub fn verify_strip(
    g: &Multigraph,
    d: &RootedDecomposition,
    strip: &Strip,
    cut: &CutTest,
) -> Result<()> {
    if strip.nodes.is_empty() {
        return Err(Error::Precondition("a strip has at least one node".into()));
    }
    if strip.s == 0 {
        return Err(Error::Precondition("s must be positive".into()));
    }
    for w in strip.nodes.windows(2) {
        if !is_precursor(d, &w[0], &w[1])? {
            return Err(Error::Precondition(format!(
                "`{}` is not a precursor of `{}`",
                w[0], w[1]
            )));
        }
    }
    let mut residues: Vec<VertexSet> = Vec::new();
    for t in &strip.nodes {
        let bag = d.bag(t)?;
        if !strip.z.iter().all(|v| bag.contains(v)) {
            return Err(Error::Precondition(format!("Z is not contained in the bag at `{t}`")));
        }
        let res: VertexSet = bag.difference(&strip.z).cloned().collect();
        if res.len() != strip.s {
            return Err(Error::Precondition(format!(
                "|bag − Z| at `{t}` is {}, expected {}",
                res.len(),
                strip.s
            )));
        }
        if res.is_empty() {
            return Err(Error::Precondition("residues must be nonempty".into()));
        }
        for other in &residues {
            if !res.is_disjoint(other) {
                return Err(Error::Precondition("residues must be pairwise disjoint".into()));
            }
        }
        residues.push(res);
    }
    let first = &strip.nodes[0];
    let last = strip.nodes.last().unwrap();
    let k = d.bag(first)?.len();
    for t in d.tree_path(first, last)? {
        if d.bag(&t)?.len() == k && cut(&t, &strip.z)? {
            return Err(Error::Precondition(format!(
                "node `{t}` on the chain is a pseudo-edge-cut modulo Z"
            )));
        }
    }
    let sys = max_disjoint_paths(g, d.bag(first)?, d.bag(last)?)?;
    if sys.len() != k {
        return Err(Error::Precondition(format!(
            "only {} of the required {k} disjoint paths exist",
            sys.len()
        )));
    }
    Ok(())
}

/// All inclusion-maximal (Z,s)-strips under the standard cut test.
pub fn find_strips(
    g: &Multigraph,
    d: &RootedDecomposition,
    z: &VertexSet,
    s: usize,
) -> Result<Vec<Strip>> {
    let cut = |t: &str, zz: &VertexSet| node_is_pseudo_edge_cut(g, d, t, zz);
    find_strips_with(g, d, z, s, &cut)
}

/// All inclusion-maximal (Z,s)-strips under a caller-supplied cut test.
pub fn find_strips_with(
    g: &Multigraph,
    d: &RootedDecomposition,
    z: &VertexSet,
    s: usize,
    cut: &CutTest,
) -> Result<Vec<Strip>> {
    if s == 0 {
        return Err(Error::Precondition("s must be positive".into()));
    }
    // candidate nodes: Z inside the bag, residue of exact size s
    let mut candidates: Vec<String> = Vec::new();
    for (t, bag) in d.bags() {
        if z.iter().all(|v| bag.contains(v)) && bag.difference(z).count() == s {
            candidates.push(t.clone());
        }
    }
    candidates.sort();
    // enumerate all chains satisfying conditions 1-4, then filter by 5
    let mut all: Vec<Vec<String>> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn grow(
        _g: &Multigraph,
        d: &RootedDecomposition,
        z: &VertexSet,
        cut: &CutTest,
        candidates: &[String],
        chain: &mut Vec<String>,
        all: &mut Vec<Vec<String>>,
    ) -> Result<()> {
        all.push(chain.clone());
        let last = chain.last().unwrap().clone();
        let used: VertexSet = chain
            .iter()
            .flat_map(|t| d.bag(t).unwrap().difference(z).cloned())
            .collect();
        for next in candidates {
            if !is_precursor(d, &last, next)? {
                continue;
            }
            let res: VertexSet = d.bag(next)?.difference(z).cloned().collect();
            if !res.is_disjoint(&used) {
                continue;
            }
            // condition 4 incrementally: newly covered path nodes
            let first = chain[0].clone();
            let k = d.bag(&first)?.len();
            let mut bad = false;
            for t in d.tree_path(&last, next)? {
                if t == last {
                    continue;
                }
                if d.bag(&t)?.len() == k && cut(&t, z)? {
                    bad = true;
                    break;
                }
            }
            if bad {
                continue;
            }
            chain.push(next.clone());
            grow(_g, d, z, cut, candidates, chain, all)?;
            chain.pop();
        }
        Ok(())
    }
    for start in &candidates {
        // condition 4 for the one-node chain
        let k = d.bag(start)?.len();
        let _ = k;
        if cut(start, z)? {
            continue;
        }
        let mut chain = vec![start.clone()];
        grow(g, d, z, cut, &candidates, &mut chain, &mut all)?;
    }
    // condition 5
    let mut valid: Vec<Vec<String>> = Vec::new();
    for chain in all {
        let first = &chain[0];
        let last = chain.last().unwrap();
        let k = d.bag(first)?.len();
        if max_disjoint_paths(g, d.bag(first)?, d.bag(last)?)?.len() == k {
            valid.push(chain);
        }
    }
    // keep inclusion-maximal chains (as subsequences)
    fn subseq(a: &[String], b: &[String]) -> bool {
        let mut it = b.iter();
        a.iter().all(|x| it.any(|y| y == x))
    }
    let mut maximal: Vec<Strip> = Vec::new();
    for (i, c) in valid.iter().enumerate() {
        let dominated = valid
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && c.len() < o.len() && subseq(c, o))
            || valid.iter().enumerate().any(|(j, o)| j < i && o == c);
        if !dominated {
            maximal.push(Strip {
                nodes: c.clone(),
                z: z.clone(),
                s,
            });
        }
    }
    maximal.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    Ok(maximal)
}

/// Maximum (Z,s)-strip length; 0 when no strip exists.
pub fn depth(g: &Multigraph, d: &RootedDecomposition, z: &VertexSet, s: usize) -> Result<usize> {
    let strips = find_strips(g, d, z, s)?;
    Ok(strips.iter().map(|st| st.len()).max().unwrap_or(0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ElevationReport {
    /// (Z, s) pairs achieving positive depth, with their depths.
    pub depths: Vec<(Vec<String>, usize, usize)>,
    pub elevation: usize,
}

/// Maximum depth over all Z ⊆ V and s ≥ 1. Z candidates are restricted to
/// subsets of individual bags; a hard host-size cap guards the cost.
pub fn depth_and_elevation(
    g: &Multigraph,
    d: &RootedDecomposition,
    host_limit: usize,
) -> Result<ElevationReport> {
    let cut = |t: &str, zz: &VertexSet| node_is_pseudo_edge_cut(g, d, t, zz);
    depth_and_elevation_with(g, d, host_limit, &cut)
}

pub fn depth_and_elevation_with(
    g: &Multigraph,
    d: &RootedDecomposition,
    host_limit: usize,
    cut: &CutTest,
) -> Result<ElevationReport> {
    if g.n() > host_limit {
        return Err(Error::SizeGuard {
            what: "elevation search",
            size: g.n(),
            limit: host_limit,
        });
    }
    let mut zs: BTreeSet<Vec<String>> = BTreeSet::new();
    for bag in d.bags().values() {
        let items: Vec<&String> = bag.iter().collect();
        for mask in 0u64..(1 << items.len()) {
            let z: Vec<String> = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| (*v).clone())
                .collect();
            zs.insert(z);
        }
    }
    let max_bag = d.bags().values().map(|b| b.len()).max().unwrap_or(0);
    let mut depths = Vec::new();
    let mut elevation = 0;
    for z in zs {
        let zset: VertexSet = z.iter().cloned().collect();
        for s in 1..=max_bag {
            let strips = find_strips_with(g, d, &zset, s, cut)?;
            let dep = strips.iter().map(|st| st.len()).max().unwrap_or(0);
            if dep > 0 {
                depths.push((z.clone(), s, dep));
                elevation = elevation.max(dep);
            }
        }
    }
    Ok(ElevationReport { depths, elevation })
}

/// Does `sep` α-break the strip: indices i_1<…<i_α<j_1<…<j_α with
/// ↓t_{i_α} ⊆ A and ↑t_{j_1} ⊆ B?
pub fn alpha_breaks(
    _g: &Multigraph,
    d: &RootedDecomposition,
    sep: &Separation,
    strip: &Strip,
    alpha: usize,
) -> Result<bool> {
    if alpha == 0 {
        return Err(Error::Precondition("alpha must be positive".into()));
    }
    let h = strip.len();
    if h < 2 * alpha {
        return Ok(false);
    }
    for p in alpha..=h {
        for q in (p + 1)..=(h - alpha + 1) {
            let ud_p = up_down(d, &strip.nodes[p - 1])?;
            let ud_q = up_down(d, &strip.nodes[q - 1])?;
            if ud_p.down.is_subset(&sep.a) && ud_q.up.is_subset(&sep.b) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// |X_t| disjoint paths from the bag of the precursor `t1` to the bag of
/// `t2`, or None when fewer exist.
pub fn foundation_paths(
    g: &Multigraph,
    d: &RootedDecomposition,
    t1: &str,
    t2: &str,
) -> Result<Option<PathSystem>> {
    if !is_precursor(d, t1, t2)? {
        return Err(Error::Precondition(format!("`{t1}` is not a precursor of `{t2}`")));
    }
    let sys = max_disjoint_paths(g, d.bag(t1)?, d.bag(t2)?)?;
    if sys.len() == d.bag(t2)?.len() {
        Ok(Some(sys))
    } else {
        Ok(None)
    }
}

/// The block-path side structures of one member of a path system.
#[derive(Debug, Clone)]
pub struct SideGraphs {
    pub q: Multigraph,
    pub l: Multigraph,
    pub r: Multigraph,
    /// Endpoint pairs of the single-edge blocks lying in `q`.
    pub single_edge_blocks: Vec<(String, String)>,
    /// The member's endpoint in the first set.
    pub v1: String,
    /// The member's endpoint in the second set.
    pub v2: String,
}

fn unique_crossing(path: &[String], bag: &VertexSet) -> Result<usize> {
    let hits: Vec<usize> = path
        .iter()
        .enumerate()
        .filter(|(_, v)| bag.contains(*v))
        .map(|(i, _)| i)
        .collect();
    if hits.len() != 1 {
        return Err(Error::Precondition(format!(
            "path must meet the bag exactly once, found {} crossings",
            hits.len()
        )));
    }
    Ok(hits[0])
}

/// The (Q,𝒫,P)-, (L,𝒫,P)- and (R,𝒫,P)-graphs between `x1` and `x2` for the
/// member at `member` of `ps`.
pub fn qlr_graphs(
    g: &Multigraph,
    ps: &PathSystem,
    member: usize,
    x1: &VertexSet,
    x2: &VertexSet,
) -> Result<SideGraphs> {
    let p = ps
        .paths
        .get(member)
        .ok_or_else(|| Error::Precondition("no such member".into()))?;
    if p.len() < 2 {
        return Err(Error::Precondition("member must have at least one edge".into()));
    }
    let i1 = unique_crossing(p, x1)?;
    let i2 = unique_crossing(p, x2)?;
    let v1 = p[i1].clone();
    let v2 = p[i2].clone();
    let mut others = VertexSet::new();
    for (i, w) in ps.paths.iter().enumerate() {
        if i != member {
            others.extend(w.iter().cloned());
        }
    }
    // the reduced graph may fall apart; blocks live in the member's component
    let reduced = g.without(&others);
    let comp = reduced
        .components()
        .into_iter()
        .find(|c| c.contains(&v1))
        .ok_or_else(|| Error::Internal("member endpoint vanished".into()))?;
    if !comp.contains(&v2) {
        return Err(Error::Precondition(
            "member endpoints separated after removing the other members".into(),
        ));
    }
    let rest = reduced.induced(&comp);
    let bt = block_decomposition(&rest)?;
    let restview = rest.view();
    let edge_block_of = |a: &str, b: &str| -> Result<usize> {
        let ai = rest.vertex_index(a)?;
        let bi = rest.vertex_index(b)?;
        let id = restview
            .edges
            .iter()
            .position(|&(x, y)| (x, y) == (ai.min(bi), ai.max(bi)))
            .ok_or_else(|| Error::Precondition(format!("edge {a}-{b} missing in the reduced graph")))?;
        bt.block_of_edge(id)
    };
    // block containing the member edge incident with v1 / v2
    let (e1a, e1b) = if i1 + 1 < p.len() && i1 < i2 {
        (p[i1].clone(), p[i1 + 1].clone())
    } else {
        (p[i1 - 1].clone(), p[i1].clone())
    };
    let (e2a, e2b) = if i2 > 0 && i1 < i2 {
        (p[i2 - 1].clone(), p[i2].clone())
    } else {
        (p[i2].clone(), p[i2 + 1].clone())
    };
    let b1 = edge_block_of(&e1a, &e1b)?;
    let b2 = edge_block_of(&e2a, &e2b)?;
    let q = path_of_blocks(&rest, &bt.blocks[b1], &bt.blocks[b2])?;
    let on_path = crate::blocks::block_tree_path(&bt, b1, b2)?;
    let mut single: Vec<(String, String)> = Vec::new();
    for bi in &on_path {
        if bt.block_edges[*bi].len() == 1 {
            let id = *bt.block_edges[*bi].iter().next().unwrap();
            let (x, y) = restview.edges[id];
            single.push((rest.name_of(x).to_string(), rest.name_of(y).to_string()));
        }
    }
    if single.is_empty() {
        return Ok(SideGraphs {
            l: q.clone(),
            r: q.clone(),
            q,
            single_edge_blocks: single,
            v1,
            v2,
        });
    }
    // components of Q − E(Q')
    let qview = q.view();
    let mut banned: BTreeSet<usize> = BTreeSet::new();
    for (id, (x, y)) in qview.edges.iter().enumerate() {
        let xn = q.name_of(*x);
        let yn = q.name_of(*y);
        if single
            .iter()
            .any(|(a, b)| (a == xn && b == yn) || (a == yn && b == xn))
        {
            banned.insert(id);
        }
    }
    let full: u64 = if q.n() >= 64 { !0 } else { (1u64 << q.n()) - 1 };
    let comps = qview.components_within_banned(full, &banned);
    let component_graph = |needle: &str| -> Result<Multigraph> {
        let ni = q.vertex_index(needle)?;
        let comp = comps
            .iter()
            .find(|c| *c & (1 << ni) != 0)
            .ok_or_else(|| Error::Internal("vertex missing from components".into()))?;
        let keep = q.from_mask(*comp);
        let mut edges = Vec::new();
        for (id, (x, y)) in qview.edges.iter().enumerate() {
            if banned.contains(&id) {
                continue;
            }
            if comp & (1 << x) != 0 && comp & (1 << y) != 0 {
                edges.push((q.name_of(*x).to_string(), q.name_of(*y).to_string()));
            }
        }
        Multigraph::new(keep.into_iter(), edges)
    };
    let l = component_graph(&v1)?;
    let r = component_graph(&v2)?;
    Ok(SideGraphs {
        q,
        l,
        r,
        single_edge_blocks: single,
        v1,
        v2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Parent,
    Child,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Jump {
    pub path: Vec<String>,
    pub ambiguous: bool,
}

/// The restricted subgraph G' used by the jump definitions: bags at the two
/// nodes plus the bags in the component of T − {t,t'} meeting the interior
/// of the connecting path.
fn jump_host(g: &Multigraph, d: &RootedDecomposition, t_anc: &str, t: &str) -> Result<Multigraph> {
    let mut keep: VertexSet = d.bag(t_anc)?.union(d.bag(t)?).cloned().collect();
    let path = d.tree_path(t_anc, t)?;
    let interior: BTreeSet<&String> = path
        .iter()
        .filter(|x| x.as_str() != t_anc && x.as_str() != t)
        .collect();
    if !interior.is_empty() {
        // component of T − {t, t'} containing the interior
        let mut comp: BTreeSet<String> = interior.iter().map(|s| (*s).clone()).collect();
        let mut grew = true;
        while grew {
            grew = false;
            for (p, c) in d.tree_edges() {
                if p == t_anc || p == t || c == t_anc || c == t {
                    continue;
                }
                if comp.contains(&p) != comp.contains(&c) {
                    comp.insert(p.clone());
                    comp.insert(c);
                    grew = true;
                }
            }
        }
        for n in comp {
            keep.extend(d.bag(&n)?.iter().cloned());
        }
    }
    Ok(g.induced(&keep))
}

/// All parent-side (resp. child-side) jumps for a member, each flagged
/// ambiguous when both of its ends lie in the bag at the jump's node.
pub fn find_jumps(
    g: &Multigraph,
    d: &RootedDecomposition,
    t_anc: &str,
    t: &str,
    ps: &PathSystem,
    member: usize,
    side: Side,
) -> Result<Vec<Jump>> {
    let bag_anc = d.bag(t_anc)?.clone();
    let bag_t = d.bag(t)?.clone();
    let p = &ps.paths[member];
    let top = unique_crossing(p, &bag_anc)?;
    let bot = unique_crossing(p, &bag_t)?;
    if p[top] == p[bot] {
        return Err(Error::Precondition(
            "member meets both bags in the same vertex; jumps are undefined".into(),
        ));
    }
    let qlr = qlr_graphs(g, ps, member, &bag_anc, &bag_t)?;
    let host = jump_host(g, d, t_anc, t)?;
    let source: VertexSet = match side {
        Side::Parent => qlr.r.vertex_set(),
        Side::Child => qlr.l.vertex_set(),
    };
    let mut member_union = VertexSet::new();
    for w in &ps.paths {
        member_union.extend(w.iter().cloned());
    }
    let mut target = VertexSet::new();
    for (i, w) in ps.paths.iter().enumerate() {
        if i != member {
            target.extend(w.iter().cloned());
        }
    }
    let shared: VertexSet = bag_anc.intersection(&bag_t).cloned().collect();
    let target: VertexSet = target.difference(&shared).cloned().collect();
    let forbidden_internal: VertexSet = source.union(&member_union).cloned().collect();
    let amb_bag = match side {
        Side::Parent => &bag_t,
        Side::Child => &bag_anc,
    };

    let mut jumps = Vec::new();
    let view = host.view();
    for start in source.iter() {
        let Ok(si) = host.vertex_index(start) else { continue };
        // DFS over simple paths leaving the source set immediately
        let mut stack: Vec<(Vec<usize>, BTreeSet<usize>)> = vec![(vec![si], BTreeSet::new())];
        while let Some((path, used_e)) = stack.pop() {
            let at = *path.last().unwrap();
            for &(w, id) in view.adj[at].iter().rev() {
                if used_e.contains(&id) || w == at {
                    continue;
                }
                let wname = host.name_of(w);
                if path.iter().any(|&x| x == w) {
                    continue;
                }
                if target.contains(wname) {
                    let mut verts: Vec<String> =
                        path.iter().map(|&x| host.name_of(x).to_string()).collect();
                    verts.push(wname.to_string());
                    let ambiguous = amb_bag.contains(&verts[0]) && amb_bag.contains(wname);
                    jumps.push(Jump {
                        path: verts,
                        ambiguous,
                    });
                    continue;
                }
                if forbidden_internal.contains(wname) {
                    continue;
                }
                let mut np = path.clone();
                np.push(w);
                let mut ne = used_e.clone();
                ne.insert(id);
                stack.push((np, ne));
            }
        }
    }
    jumps.sort_by(|a, b| a.path.cmp(&b.path));
    jumps.dedup();
    Ok(jumps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StaticFlags {
    pub member: usize,
    /// False when the member meets both bags in the same vertex (the static
    /// notions are undefined for it).
    pub applicable: bool,
    pub parent_side_static: bool,
    pub child_side_static: bool,
}

/// Static classification of every member of a foundation-path system between
/// a precursor `t_anc` and `t`.
pub fn classify_static(
    g: &Multigraph,
    d: &RootedDecomposition,
    t_anc: &str,
    t: &str,
    ps: &PathSystem,
) -> Result<Vec<StaticFlags>> {
    let bag_anc = d.bag(t_anc)?.clone();
    let bag_t = d.bag(t)?.clone();
    let mut out = Vec::new();
    for (i, p) in ps.paths.iter().enumerate() {
        let top = unique_crossing(p, &bag_anc)?;
        let bot = unique_crossing(p, &bag_t)?;
        let u = p[top].clone();
        let v = p[bot].clone();
        if u == v {
            out.push(StaticFlags {
                member: i,
                applicable: false,
                parent_side_static: false,
                child_side_static: false,
            });
            continue;
        }
        let mut others = VertexSet::new();
        for (j, w) in ps.paths.iter().enumerate() {
            if j != i {
                others.extend(w.iter().cloned());
            }
        }
        let rest = g.without(&others);
        let avoid: VertexSet = bag_anc
            .union(&bag_t)
            .filter(|x| **x != u && **x != v)
            .filter(|x| rest.has_vertex(x))
            .cloned()
            .collect();
        let two = two_edge_disjoint_paths(&rest, &u, &v, &avoid)?;
        let pj = find_jumps(g, d, t_anc, t, ps, i, Side::Parent)?;
        let cj = find_jumps(g, d, t_anc, t, ps, i, Side::Child)?;
        out.push(StaticFlags {
            member: i,
            applicable: true,
            parent_side_static: pj.is_empty() && !two,
            child_side_static: cj.iter().all(|j| j.ambiguous) && !two,
        });
    }
    Ok(out)
}

fn components_removing(
    g: &Multigraph,
    removed: &VertexSet,
    banned_edge: (&str, &str),
) -> Result<Vec<VertexSet>> {
    let view = g.view();
    let mut mask: u64 = 0;
    for v in g.vertices() {
        if !removed.contains(v) {
            mask |= 1 << g.vertex_index(v)?;
        }
    }
    let mut banned = BTreeSet::new();
    let (ba, bb) = banned_edge;
    if g.has_vertex(ba) && g.has_vertex(bb) {
        let ai = g.vertex_index(ba)?;
        let bi = g.vertex_index(bb)?;
        for (id, (x, y)) in view.edges.iter().enumerate() {
            if (*x, *y) == (ai.min(bi), ai.max(bi)) {
                banned.insert(id);
            }
        }
    }
    Ok(view
        .components_within_banned(mask, &banned)
        .into_iter()
        .map(|m| g.from_mask(m))
        .collect())
}

/// Per-member separation on the parent side: boundary (X_t − {v_P}) ∪ {w}.
fn member_parent_separation(
    g: &Multigraph,
    d: &RootedDecomposition,
    t_anc: &str,
    t: &str,
    ps: &PathSystem,
    member: usize,
) -> Result<Separation> {
    let bag_anc = d.bag(t_anc)?.clone();
    let bag_t = d.bag(t)?.clone();
    let qlr = qlr_graphs(g, ps, member, &bag_anc, &bag_t)?;
    let v_p = qlr.v2.clone();
    let rset = qlr.r.vertex_set();
    let cands: Vec<(String, String)> = qlr
        .single_edge_blocks
        .iter()
        .filter(|(a, b)| rset.contains(a) || rset.contains(b))
        .map(|(a, b)| {
            if rset.contains(a) {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        })
        .collect();
    if cands.len() != 1 {
        return Err(Error::Precondition(format!(
            "expected a unique single-edge block at the R-graph, found {}",
            cands.len()
        )));
    }
    let (w, w_other) = cands[0].clone();
    let removed: VertexSet = bag_t.iter().filter(|x| **x != v_p).cloned().collect();
    let comps = components_removing(g, &removed, (&w, &w_other))?;
    let rprime = comps
        .iter()
        .find(|c| c.contains(&v_p))
        .cloned()
        .ok_or_else(|| Error::Internal("R-graph vanished".into()))?;
    let ud = up_down(d, t)?;
    let a: VertexSet = ud
        .down
        .iter()
        .filter(|x| !rprime.contains(*x) || **x == w)
        .cloned()
        .collect();
    let b: VertexSet = ud.up.union(&rprime).cloned().collect();
    Separation::new(g, a, b)
}

/// Per-member separation on the child side: boundary (X_{t'} − {u_P}) ∪ {w'}.
fn member_child_separation(
    g: &Multigraph,
    d: &RootedDecomposition,
    t_anc: &str,
    t: &str,
    ps: &PathSystem,
    member: usize,
) -> Result<Separation> {
    let bag_anc = d.bag(t_anc)?.clone();
    let bag_t = d.bag(t)?.clone();
    let qlr = qlr_graphs(g, ps, member, &bag_anc, &bag_t)?;
    let u_p = qlr.v1.clone();
    let lset = qlr.l.vertex_set();
    let cands: Vec<(String, String)> = qlr
        .single_edge_blocks
        .iter()
        .filter(|(a, b)| lset.contains(a) || lset.contains(b))
        .map(|(a, b)| {
            if lset.contains(a) {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        })
        .collect();
    if cands.len() != 1 {
        return Err(Error::Precondition(format!(
            "expected a unique single-edge block at the L-graph, found {}",
            cands.len()
        )));
    }
    let (w, w_prime) = cands[0].clone();
    let _ = w;
    let removed: VertexSet = bag_anc.iter().filter(|x| **x != u_p).cloned().collect();
    let comps = components_removing(g, &removed, (&cands[0].0, &cands[0].1))?;
    let lprime = comps
        .iter()
        .find(|c| c.contains(&u_p))
        .cloned()
        .ok_or_else(|| Error::Internal("L-graph vanished".into()))?;
    let ud = up_down(d, t_anc)?;
    let mut a: VertexSet = ud.down.union(&lprime).cloned().collect();
    a.insert(w_prime.clone());
    let b: VertexSet = ud.up.iter().filter(|x| !lprime.contains(*x)).cloned().collect();
    Separation::new(g, a, b)
}

/// The parent- or child-side progress; errors when no member qualifies.
pub fn side_progress(
    g: &Multigraph,
    d: &RootedDecomposition,
    node: &str,
    other: &str,
    excl_anc: Option<&str>,
    ps: &PathSystem,
    side: Side,
) -> Result<Separation> {
    let sep = side_progress_inner(g, d, node, other, excl_anc, ps, side)?;
    match sep {
        Some(s) => Ok(s),
        None => Err(Error::Precondition("no qualifying member".into())),
    }
}

/// Restricts a path system to the segment between the bags of two nodes.
pub fn restrict_system(
    d: &RootedDecomposition,
    ps: &PathSystem,
    a: &str,
    b: &str,
) -> Result<PathSystem> {
    let bag_a = d.bag(a)?.clone();
    let bag_b = d.bag(b)?.clone();
    let mut paths = Vec::new();
    for p in &ps.paths {
        let i = unique_crossing(p, &bag_a)?;
        let j = unique_crossing(p, &bag_b)?;
        if i > j {
            return Err(Error::Precondition("member crosses the bags out of order".into()));
        }
        paths.push(p[i..=j].to_vec());
    }
    Ok(PathSystem {
        paths,
        from: bag_a,
        to: bag_b,
    })
}

fn side_progress_inner(
    g: &Multigraph,
    d: &RootedDecomposition,
    node: &str,
    other: &str,
    excl_anc: Option<&str>,
    ps: &PathSystem,
    side: Side,
) -> Result<Option<Separation>> {
    match side {
        Side::Parent => {
            // progress of `node` with respect to its precursor `other`
            let seg = restrict_system(d, ps, other, node)?;
            let flags = classify_static(g, d, other, node, &seg)?;
            let members: Vec<usize> = flags
                .iter()
                .filter(|f| f.applicable && f.parent_side_static)
                .map(|f| f.member)
                .collect();
            if members.is_empty() {
                return Ok(None);
            }
            let ud = up_down(d, node)?;
            let mut a = ud.down.clone();
            let mut b = ud.up.clone();
            for m in members {
                let s = member_parent_separation(g, d, other, node, &seg, m)?;
                a = a.intersection(&s.a).cloned().collect();
                b = b.union(&s.b).cloned().collect();
            }
            Ok(Some(Separation::new(g, a, b)?))
        }
        Side::Child => {
            // progress of `node` with respect to its descendant `other`,
            // excluding members parent-side static for (excl_anc, node)
            let seg = restrict_system(d, ps, node, other)?;
            let flags = classify_static(g, d, node, other, &seg)?;
            let excluded: BTreeSet<usize> = match excl_anc {
                None => BTreeSet::new(),
                Some(t2) => {
                    let seg2 = restrict_system(d, ps, t2, node)?;
                    classify_static(g, d, t2, node, &seg2)?
                        .into_iter()
                        .filter(|f| f.applicable && f.parent_side_static)
                        .map(|f| f.member)
                        .collect()
                }
            };
            let members: Vec<usize> = flags
                .iter()
                .filter(|f| f.applicable && f.child_side_static && !excluded.contains(&f.member))
                .map(|f| f.member)
                .collect();
            if members.is_empty() {
                return Ok(None);
            }
            let ud = up_down(d, node)?;
            let mut a = ud.down.clone();
            let mut b = ud.up.clone();
            for m in members {
                let s = member_child_separation(g, d, node, other, &seg, m)?;
                a = a.union(&s.a).cloned().collect();
                b = b.intersection(&s.b).cloned().collect();
            }
            Ok(Some(Separation::new(g, a, b)?))
        }
    }
}

/// The shifted progress (L*,M*) for a precursor chain t1, t2, t3 with
/// pairwise-disjoint equal-size bags and the static pattern split at `r`:
/// members 1..=r parent-side static for (t1,t2), the rest not parent-side
/// static for (t1,t2) but child-side static for (t2,t3). The hypotheses are
/// checked; the conclusion (pseudo-edge-cut modulo ∅ of order s with
/// ↓t1 ⊆ L* and ↑t3 ⊆ M*) is asserted on the result.
pub fn progress_shift(
    g: &Multigraph,
    d: &RootedDecomposition,
    t1: &str,
    t2: &str,
    t3: &str,
    ps: &PathSystem,
    r: usize,
) -> Result<Separation> {
    if !is_precursor(d, t1, t2)? || !is_precursor(d, t2, t3)? {
        return Err(Error::Precondition("t1, t2, t3 must form a precursor chain".into()));
    }
    let b1 = d.bag(t1)?.clone();
    let b2 = d.bag(t2)?.clone();
    let b3 = d.bag(t3)?.clone();
    let s = b1.len();
    if b2.len() != s || b3.len() != s {
        return Err(Error::Precondition("bags must have equal size".into()));
    }
    if !b1.is_disjoint(&b2) || !b2.is_disjoint(&b3) || !b1.is_disjoint(&b3) {
        return Err(Error::Precondition("bags must be pairwise disjoint".into()));
    }
    if ps.len() != s {
        return Err(Error::Precondition("the path system must have s members".into()));
    }
    ps.verify(g)?;
    if r > s {
        return Err(Error::Precondition("r must be at most s".into()));
    }
    // hypothesis check: static pattern
    let seg12 = restrict_system(d, ps, t1, t2)?;
    let seg23 = restrict_system(d, ps, t2, t3)?;
    let f12 = classify_static(g, d, t1, t2, &seg12)?;
    let f23 = classify_static(g, d, t2, t3, &seg23)?;
    for i in 0..s {
        if i < r {
            if !(f12[i].applicable && f12[i].parent_side_static) {
                return Err(Error::Precondition(format!(
                    "member {i} must be parent-side static for (t1,t2)"
                )));
            }
        } else {
            if f12[i].applicable && f12[i].parent_side_static {
                return Err(Error::Precondition(format!(
                    "member {i} must not be parent-side static for (t1,t2)"
                )));
            }
            if !(f23[i].applicable && f23[i].child_side_static) {
                return Err(Error::Precondition(format!(
                    "member {i} must be child-side static for (t2,t3)"
                )));
            }
        }
    }
    let node_sep = {
        let ud = up_down(d, t2)?;
        Separation {
            a: ud.down,
            b: ud.up,
        }
    };
    let lm = side_progress_inner(g, d, t2, t1, None, ps, Side::Parent)?.unwrap_or_else(|| node_sep.clone());
    let lpmp = side_progress_inner(g, d, t2, t3, Some(t1), ps, Side::Child)?.unwrap_or(node_sep);
    let ud2 = up_down(d, t2)?;
    let mut low_union = VertexSet::new();
    for p in ps.paths.iter().take(r) {
        low_union.extend(p.iter().cloned());
    }
    let mut high_union = VertexSet::new();
    for p in ps.paths.iter().skip(r) {
        high_union.extend(p.iter().cloned());
    }
    let x2_low: VertexSet = b2.intersection(&low_union).cloned().collect();
    let x2_high: VertexSet = b2.intersection(&high_union).cloned().collect();
    let mut l_star = lm.a.clone();
    for v in ud2.up.intersection(&lpmp.a) {
        if !x2_low.contains(v) {
            l_star.insert(v.clone());
        }
    }
    let mut m_star = lpmp.b.clone();
    for v in ud2.down.intersection(&lm.b) {
        if !x2_high.contains(v) {
            m_star.insert(v.clone());
        }
    }
    let out = Separation::new(g, l_star, m_star)?;
    // conclusion asserted
    if !is_pseudo_edge_cut(g, &out, &VertexSet::new())? {
        return Err(Error::Internal("progress shift is not a pseudo-edge-cut modulo ∅".into()));
    }
    if out.order() != s {
        return Err(Error::Internal(format!(
            "progress shift has order {}, expected {s}",
            out.order()
        )));
    }
    let ud1 = up_down(d, t1)?;
    let ud3 = up_down(d, t3)?;
    if !ud1.down.is_subset(&out.a) || !ud3.up.is_subset(&out.b) {
        return Err(Error::Internal("progress shift misses the chain's ends".into()));
    }
    Ok(out)
}

/// Best-effort search for a pseudo-edge-cut modulo Z of order |X_{t_1}| that
/// α-breaks the strip: first the progress pipeline on coherent-uniform
/// subsequences, then exhaustive separation search at desk scale.
pub fn break_strip(
    g: &Multigraph,
    d: &RootedDecomposition,
    strip: &Strip,
    alpha: usize,
) -> Result<Option<Separation>> {
    let order = d.bag(&strip.nodes[0])?.len();
    if strip.len() >= 2 * alpha + 1 {
        if let Some(sep) = pipeline_break(g, d, strip, alpha)? {
            return Ok(Some(sep));
        }
    }
    // exhaustive fallback
    if g.n() > 14 {
        return Err(Error::SizeGuard {
            what: "exhaustive strip breaking",
            size: g.n(),
            limit: 14,
        });
    }
    for sep in crate::separation::enumerate_separations(g, order)? {
        if sep.order() != order {
            continue;
        }
        if !is_pseudo_edge_cut(g, &sep, &strip.z)? {
            continue;
        }
        if alpha_breaks(g, d, &sep, strip, alpha)? {
            return Ok(Some(sep));
        }
    }
    Ok(None)
}

/// Nine-way pointedness profile of a strip node at a vertex of Z, used to
/// select coherent-uniform subsequences.
fn z_color(g: &Multigraph, d: &RootedDecomposition, t: &str, z: &VertexSet) -> Result<Vec<(u8, u8)>> {
    let sep = separation_given_by(g, d, t)?;
    let (_, flags) = breadth_of(g, &sep)?;
    let mut out = Vec::new();
    for v in z {
        let f = flags.iter().find(|f| &f.vertex == v);
        let (ia, ib) = match f {
            Some(f) => (f.edges_into_a, f.edges_into_b),
            None => (0, 0),
        };
        let pa = if ia >= 2 { 2 } else { ia as u8 };
        let pb = if ib >= 2 { 2 } else { ib as u8 };
        out.push((pa, pb));
    }
    Ok(out)
}

fn pipeline_break(
    g: &Multigraph,
    d: &RootedDecomposition,
    strip: &Strip,
    alpha: usize,
) -> Result<Option<Separation>> {
    // coherent-uniform subsequences via the 9-coloring of (node, Z-vertex)
    let mut groups: std::collections::BTreeMap<Vec<(u8, u8)>, Vec<String>> = Default::default();
    for t in &strip.nodes {
        groups.entry(z_color(g, d, t, &strip.z)?).or_default().push(t.clone());
    }
    // reduced host and decomposition over G − Z
    let gz = g.without(&strip.z);
    let mut bags = std::collections::BTreeMap::new();
    for (t, bag) in d.bags() {
        bags.insert(t.clone(), bag.difference(&strip.z).cloned().collect());
    }
    let dz = RootedDecomposition::new(d.root().to_string(), bags, &d.tree_edges())?;
    for nodes in groups.values() {
        if nodes.len() < 3 {
            continue;
        }
        // full family over the reduced graph between first and last group nodes
        for ai in 0..nodes.len() {
            for bi in (ai + 1)..nodes.len() {
                for ci in (bi + 1)..nodes.len() {
                    let (ta, tb, tc) = (&nodes[ai], &nodes[bi], &nodes[ci]);
                    if !is_precursor(&dz, ta, tb)? || !is_precursor(&dz, tb, tc)? {
                        continue;
                    }
                    let Ok(sys) = max_disjoint_paths(&gz, dz.bag(ta)?, dz.bag(tc)?) else {
                        continue;
                    };
                    if sys.len() != strip.s {
                        continue;
                    }
                    // classify and order members: parent-static first
                    let Ok(seg12) = restrict_system(&dz, &sys, ta, tb) else { continue };
                    let Ok(seg23) = restrict_system(&dz, &sys, tb, tc) else { continue };
                    let Ok(f12) = classify_static(&gz, &dz, ta, tb, &seg12) else { continue };
                    let Ok(f23) = classify_static(&gz, &dz, tb, tc, &seg23) else { continue };
                    let mut stat = Vec::new();
                    let mut rest = Vec::new();
                    let mut ok = true;
                    for i in 0..strip.s {
                        if f12[i].applicable && f12[i].parent_side_static {
                            stat.push(i);
                        } else if f23[i].applicable && f23[i].child_side_static {
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
                    let Ok(shift) = progress_shift(&gz, &dz, ta, tb, tc, &ordered, r) else {
                        continue;
                    };
                    let a: VertexSet = shift.a.union(&strip.z).cloned().collect();
                    let b: VertexSet = shift.b.union(&strip.z).cloned().collect();
                    let Ok(lifted) = Separation::new(g, a, b) else { continue };
                    if lifted.order() == d.bag(&strip.nodes[0])?.len()
                        && is_pseudo_edge_cut(g, &lifted, &strip.z)?
                        && alpha_breaks(g, d, &lifted, strip, alpha)?
                    {
                        return Ok(Some(lifted));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_of, set_of};

    /// Two doubled chains side by side with bags {x_i, y_i} on a path of nodes.
    fn double_chain(k: usize) -> (Multigraph, RootedDecomposition) {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for i in 0..=k {
            vs.push(format!("x{i}"));
            vs.push(format!("y{i}"));
        }
        for i in 0..k {
            for p in ["x", "y"] {
                let e = (format!("{p}{i}"), format!("{p}{}", i + 1));
                es.push(e.clone());
                es.push(e);
            }
        }
        let g = Multigraph::new(vs, es).unwrap();
        let mut bags = std::collections::BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..=k {
            bags.insert(format!("n{i}"), set_of_pair(i));
            if i > 0 {
                bags.insert(format!("m{i}"), {
                    let mut b = set_of_pair(i - 1);
                    b.extend(set_of_pair(i));
                    b
                });
                edges.push((format!("n{}", i - 1), format!("m{i}")));
                edges.push((format!("m{i}"), format!("n{i}")));
            }
        }
        let d = RootedDecomposition::new("n0".into(), bags, &edges).unwrap();
        (g, d)
    }

    fn set_of_pair(i: usize) -> VertexSet {
        [format!("x{i}"), format!("y{i}")].into_iter().collect()
    }

    /// Plain ladder rails (single edges), optional chord.
    fn ladder(k: usize, chords: &[(&str, &str)]) -> (Multigraph, RootedDecomposition) {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for i in 0..=k {
            vs.push(format!("x{i}"));
            vs.push(format!("y{i}"));
        }
        for i in 0..k {
            es.push((format!("x{i}"), format!("x{}", i + 1)));
            es.push((format!("y{i}"), format!("y{}", i + 1)));
        }
        for (a, b) in chords {
            es.push((a.to_string(), b.to_string()));
        }
        let g = Multigraph::new(vs, es).unwrap();
        let mut bags = std::collections::BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..=k {
            bags.insert(format!("n{i}"), set_of_pair(i));
            if i > 0 {
                bags.insert(format!("m{i}"), {
                    let mut b = set_of_pair(i - 1);
                    b.extend(set_of_pair(i));
                    b
                });
                edges.push((format!("n{}", i - 1), format!("m{i}")));
                edges.push((format!("m{i}"), format!("n{i}")));
            }
        }
        let d = RootedDecomposition::new("n0".into(), bags, &edges).unwrap();
        (g, d)
    }

    #[test]
    fn single_bag_no_strips() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let d = RootedDecomposition::parse(r#"{"root":"t","bags":{"t":["a","b","c"]},"edges":[]}"#).unwrap();
        for s in 1..=3 {
            assert!(find_strips(&g, &d, &set_of([]), s).unwrap().is_empty());
        }
        assert_eq!(depth_and_elevation(&g, &d, 14).unwrap().elevation, 0);
    }

    #[test]
    fn path_decomposition_no_strips() {
        let g = graph_of(&["v1", "v2", "v3", "v4"], &[("v1", "v2"), ("v2", "v3"), ("v3", "v4")]);
        let d = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["v1","v2"],"t2":["v2","v3"],"t3":["v3","v4"]},
                "edges":[["t1","t2"],["t2","t3"]]}"#,
        )
        .unwrap();
        assert!(find_strips(&g, &d, &set_of([]), 2).unwrap().is_empty());
        assert_eq!(depth_and_elevation(&g, &d, 14).unwrap().elevation, 0);
    }

    #[test]
    fn z_not_in_bags_gives_empty() {
        let g = graph_of(&["a", "b"], &[("a", "b")]);
        let d = RootedDecomposition::parse(r#"{"root":"t","bags":{"t":["a","b"]},"edges":[]}"#).unwrap();
        assert!(find_strips(&g, &d, &set_of(["a"]), 2).unwrap().is_empty());
    }

    #[test]
    fn double_chain_strip() {
        let (g, d) = double_chain(4);
        let strips = find_strips(&g, &d, &set_of([]), 2).unwrap();
        // the whole small-bag chain sans the root forms a strip
        let longest = strips.iter().map(|s| s.len()).max().unwrap();
        assert_eq!(longest, 4);
        let best = strips.iter().find(|s| s.len() == 4).unwrap();
        assert_eq!(best.nodes, vec!["n1", "n2", "n3", "n4"]);
        verify_strip(&g, &d, best, &|t, z| node_is_pseudo_edge_cut(&g, &d, t, z)).unwrap();
        let rep = depth_and_elevation(&g, &d, 14).unwrap();
        assert_eq!(rep.elevation, 4);
    }

    #[test]
    fn alpha_breaks_cases() {
        let (g, d) = double_chain(4);
        let strip = Strip {
            nodes: vec!["n1".into(), "n2".into(), "n3".into(), "n4".into()],
            z: set_of([]),
            s: 2,
        };
        // the trivial separation (V, V) breaks any strip of length >= 2a
        let full = Separation {
            a: g.vertex_set(),
            b: g.vertex_set(),
        };
        assert!(alpha_breaks(&g, &d, &full, &strip, 2).unwrap());
        assert!(!alpha_breaks(&g, &d, &full, &strip, 3).unwrap());
        // a one-sided separation cannot break
        let lop = Separation {
            a: set_of(["x0", "y0"]),
            b: g.vertex_set(),
        };
        assert!(!alpha_breaks(&g, &d, &lop, &strip, 1).unwrap());
    }

    #[test]
    fn foundation_paths_cases() {
        let (g, d) = double_chain(3);
        let sys = foundation_paths(&g, &d, "n1", "n3").unwrap().unwrap();
        assert_eq!(sys.len(), 2);
        // identical bags: one-vertex paths
        let g2 = graph_of(&["a"], &[]);
        let d2 = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["a"],"t2":["a"]},"edges":[["t1","t2"]]}"#,
        )
        .unwrap();
        let sys2 = foundation_paths(&g2, &d2, "t1", "t2").unwrap().unwrap();
        assert_eq!(sys2.paths, vec![vec!["a".to_string()]]);
        // bottleneck: fewer paths than needed
        let (mut vs, mut es) = (vec![], vec![]);
        for i in 0..=2 {
            vs.push(format!("x{i}"));
            vs.push(format!("y{i}"));
        }
        es.push(("x0".to_string(), "x1".to_string()));
        es.push(("y0".to_string(), "x1".to_string()));
        es.push(("x1".to_string(), "x2".to_string()));
        es.push(("x1".to_string(), "y2".to_string()));
        let g3 = Multigraph::new(vs, es).unwrap();
        let d3 = RootedDecomposition::parse(
            r#"{"root":"t1","bags":{"t1":["x0","y0"],"tm":["x0","y0","x1"],"tm2":["x1","x2","y2"],"t2":["x2","y2"]},
                "edges":[["t1","tm"],["tm","tm2"],["tm2","t2"]]}"#,
        )
        .unwrap();
        assert!(foundation_paths(&g3, &d3, "t1", "t2").unwrap().is_none());
    }

    #[test]
    fn qlr_on_theta() {
        // theta graph: a=b via three internally disjoint paths; one member
        // occupies the middle route, the others stay free
        let g = graph_of(
            &["a", "m1", "m2", "b", "p", "q"],
            &[("a", "m1"), ("m1", "b"), ("a", "m2"), ("m2", "b"), ("a", "p"), ("p", "b"), ("a", "q"), ("q", "b")],
        );
        let ps = PathSystem {
            paths: vec![
                vec!["a".into(), "m1".into(), "b".into()],
            ],
            from: set_of(["a"]),
            to: set_of(["b"]),
        };
        let qlr = qlr_graphs(&g, &ps, 0, &set_of(["a"]), &set_of(["b"])).unwrap();
        // removing nothing else: the whole graph is 2-connected, one block
        assert_eq!(qlr.q.vertex_set(), g.vertex_set());
        assert!(qlr.single_edge_blocks.is_empty());
        assert_eq!(qlr.l.vertex_set(), qlr.q.vertex_set());
        // single-edge member on a path: L and R collapse to vertices
        let p3 = graph_of(&["u", "w", "v"], &[("u", "w"), ("w", "v")]);
        let ps2 = PathSystem {
            paths: vec![vec!["u".into(), "w".into(), "v".into()]],
            from: set_of(["u"]),
            to: set_of(["v"]),
        };
        let qlr2 = qlr_graphs(&p3, &ps2, 0, &set_of(["u"]), &set_of(["v"])).unwrap();
        assert_eq!(qlr2.l.vertex_set(), set_of(["u"]));
        assert_eq!(qlr2.r.vertex_set(), set_of(["v"]));
        assert_eq!(qlr2.single_edge_blocks.len(), 2);
    }

    #[test]
    fn jumps_and_static_on_ladder() {
        let (g, d) = ladder(4, &[]);
        let sys = max_disjoint_paths(&g, d.bag("n0").unwrap(), d.bag("n2").unwrap()).unwrap();
        assert_eq!(sys.len(), 2);
        for m in 0..2 {
            assert!(find_jumps(&g, &d, "n0", "n2", &sys, m, Side::Parent).unwrap().is_empty());
            assert!(find_jumps(&g, &d, "n0", "n2", &sys, m, Side::Child).unwrap().is_empty());
        }
        let flags = classify_static(&g, &d, "n0", "n2", &sys).unwrap();
        assert!(flags.iter().all(|f| f.applicable && f.parent_side_static && f.child_side_static));
        // doubled member is never static
        let (g2, d2) = double_chain(2);
        let sys2 = max_disjoint_paths(&g2, d2.bag("n0").unwrap(), d2.bag("n2").unwrap()).unwrap();
        let flags2 = classify_static(&g2, &d2, "n0", "n2", &sys2).unwrap();
        assert!(flags2.iter().all(|f| f.applicable && !f.parent_side_static && !f.child_side_static));
    }

    #[test]
    fn chord_makes_parent_jump() {
        let (g, d) = ladder(4, &[("x2", "y1")]);
        let sys = max_disjoint_paths(&g, d.bag("n0").unwrap(), d.bag("n2").unwrap()).unwrap();
        // member along the top rail has a parent-side jump x2 -> y1
        let top = sys.paths.iter().position(|p| p[0] == "x0").unwrap();
        let jumps = find_jumps(&g, &d, "n0", "n2", &sys, top, Side::Parent).unwrap();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].path, vec!["x2".to_string(), "y1".to_string()]);
        assert!(!jumps[0].ambiguous);
        let flags = classify_static(&g, &d, "n0", "n2", &sys).unwrap();
        assert!(!flags[top].parent_side_static);
        assert!(flags[1 - top].parent_side_static);
    }

    #[test]
    fn progress_shift_all_static() {
        let (g, d) = ladder(4, &[]);
        let sys = max_disjoint_paths(&g, d.bag("n0").unwrap(), d.bag("n4").unwrap()).unwrap();
        let out = progress_shift(&g, &d, "n0", "n2", "n4", &sys, 2).unwrap();
        // all members static: the shifted cut is the node separation at n2
        assert_eq!(out.boundary(), set_of(["x2", "y2"]));
    }

    #[test]
    fn progress_shift_mixed() {
        let (g, d) = ladder(4, &[("x2", "y1")]);
        let sys = max_disjoint_paths(&g, d.bag("n0").unwrap(), d.bag("n4").unwrap()).unwrap();
        let top = sys.paths.iter().position(|p| p[0] == "x0").unwrap();
        let ordered = PathSystem {
            paths: vec![sys.paths[1 - top].clone(), sys.paths[top].clone()],
            from: sys.from.clone(),
            to: sys.to.clone(),
        };
        let out = progress_shift(&g, &d, "n0", "n2", "n4", &ordered, 1).unwrap();
        assert_eq!(out.boundary(), set_of(["x3", "y2"]));
        assert!(is_pseudo_edge_cut(&g, &out, &set_of([])).unwrap());
        // wrong split is rejected
        assert!(progress_shift(&g, &d, "n0", "n2", "n4", &ordered, 2).is_err());
    }

    #[test]
    fn break_strip_finds_diagonal_cut() {
        // rails doubled except one single column each, staggered: no node
        // separation is a pseudo-edge-cut, but the diagonal {x3, y2} is
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for i in 0..=6 {
            vs.push(format!("x{i}"));
            vs.push(format!("y{i}"));
        }
        for i in 0..6 {
            let top = (format!("x{i}"), format!("x{}", i + 1));
            es.push(top.clone());
            if i != 2 {
                es.push(top);
            }
            let bot = (format!("y{i}"), format!("y{}", i + 1));
            es.push(bot.clone());
            if i != 1 {
                es.push(bot);
            }
        }
        let g = Multigraph::new(vs, es).unwrap();
        let mut bags = std::collections::BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..=6 {
            bags.insert(format!("n{i}"), set_of_pair(i));
            if i > 0 {
                bags.insert(format!("m{i}"), {
                    let mut b = set_of_pair(i - 1);
                    b.extend(set_of_pair(i));
                    b
                });
                edges.push((format!("n{}", i - 1), format!("m{i}")));
                edges.push((format!("m{i}"), format!("n{i}")));
            }
        }
        let d = RootedDecomposition::new("n0".into(), bags, &edges).unwrap();
        let strips = find_strips(&g, &d, &set_of([]), 2).unwrap();
        let longest = strips.iter().max_by_key(|s| s.len()).unwrap();
        assert_eq!(longest.nodes.len(), 6);
        let sep = break_strip(&g, &d, longest, 1)
            .unwrap()
            .expect("a breaking pseudo-edge-cut exists");
        assert_eq!(sep.boundary(), set_of(["x3", "y2"]));
        assert!(is_pseudo_edge_cut(&g, &sep, &set_of([])).unwrap());
        assert!(alpha_breaks(&g, &d, &sep, longest, 1).unwrap());
        // re-checked conclusions of the pipeline on an unbreakable corridor:
        // fully doubled rails admit no crossing pointed cut
        let (g2, d2) = double_chain(4);
        let strips2 = find_strips(&g2, &d2, &set_of([]), 2).unwrap();
        let long2 = strips2.iter().max_by_key(|s| s.len()).unwrap();
        assert!(break_strip(&g2, &d2, long2, 2).unwrap().is_none());
    }
}

#[cfg(test)]
mod apex_tests {
    use super::*;
    use crate::graph::set_of;

    /// Staggered ladder plus an apex vertex lying in every bag: strips and
    /// breaking run modulo Z = {z}.
    #[test]
    fn break_strip_modulo_apex() {
        let mut vs = vec!["z".to_string()];
        let mut es = Vec::new();
        for i in 0..=6 {
            vs.push(format!("x{i}"));
            vs.push(format!("y{i}"));
        }
        for i in 0..6 {
            let top = (format!("x{i}"), format!("x{}", i + 1));
            es.push(top.clone());
            if i != 2 {
                es.push(top);
            }
            let bot = (format!("y{i}"), format!("y{}", i + 1));
            es.push(bot.clone());
            if i != 1 {
                es.push(bot);
            }
        }
        es.push(("z".into(), "x0".into()));
        es.push(("z".into(), "x0".into()));
        let g = Multigraph::new(vs, es).unwrap();
        let mut bags = std::collections::BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..=6 {
            let mut col: VertexSet = [format!("x{i}"), format!("y{i}")].into_iter().collect();
            col.insert("z".into());
            bags.insert(format!("n{i}"), col.clone());
            if i > 0 {
                let mut wide: VertexSet =
                    [format!("x{}", i - 1), format!("y{}", i - 1)].into_iter().collect();
                wide.extend(col);
                bags.insert(format!("m{i}"), wide);
                edges.push((format!("n{}", i - 1), format!("m{i}")));
                edges.push((format!("m{i}"), format!("n{i}")));
            }
        }
        let d = RootedDecomposition::new("n0".into(), bags, &edges).unwrap();
        assert!(crate::decomp::validate(&g, &d).is_ok());
        let z = set_of(["z"]);
        let strips = find_strips(&g, &d, &z, 2).unwrap();
        let longest = strips.iter().max_by_key(|s| s.len()).unwrap();
        assert!(longest.len() >= 6, "strip length {}", longest.len());
        let sep = break_strip(&g, &d, longest, 1)
            .unwrap()
            .expect("breaking cut modulo the apex exists");
        assert!(is_pseudo_edge_cut(&g, &sep, &z).unwrap());
        assert!(sep.boundary().contains("z"));
        assert_eq!(sep.boundary(), set_of(["x3", "y2", "z"]));
        assert!(alpha_breaks(&g, &d, &sep, longest, 1).unwrap());
    }
}
