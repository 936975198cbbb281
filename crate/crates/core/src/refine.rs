//! Decomposition refinement: separation shifting, incorporation and
//! signatures, the two improvement constructions, edge normalization, and
//! the driver loop that iterates them to a linked, integrated, nested
//! decomposition.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::decomp::{
    is_precursor, metrics, separation_given_by, up_down, validate, RootedDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};
use crate::paths::max_disjoint_paths;
use crate::separation::{
    breadth_of, enumerate_separations, reflection, separation_predicates, Breadth, Separation,
};

/// Counts of incorporated separations per breadth class (order, thickness),
/// for all thickness ≤ order ≤ max_order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub max_order: usize,
    pub counts: BTreeMap<(usize, usize), u64>,
}

impl Signature {
    pub fn flat(&self) -> Vec<(usize, usize, u64)> {
        self.counts.iter().map(|(&(i, j), &c)| (i, j, c)).collect()
    }
}

/// Lexicographic comparison over orders, then thicknesses.
pub fn compare_signatures(a: &Signature, b: &Signature) -> Result<Ordering> {
    if a.max_order != b.max_order {
        return Err(Error::Precondition("signatures have different max orders".into()));
    }
    for i in 0..=a.max_order {
        for j in 0..=i {
            let x = a.counts.get(&(i, j)).copied().unwrap_or(0);
            let y = b.counts.get(&(i, j)).copied().unwrap_or(0);
            match x.cmp(&y) {
                Ordering::Equal => {}
                other => return Ok(other),
            }
        }
    }
    Ok(Ordering::Equal)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    pub nodes: Vec<String>,
}

/// Shifts a separation with X_{t1} ⊆ A and X_{t2} ⊆ B so that ↓t1 ⊆ A*,
/// ↑t2 ⊆ B*, the boundary is unchanged, and every side node wholly inside
/// one side has its whole subtree inside one side. Runs the bad-node
/// elimination loop, moving components of G − (A∩B).
pub fn shift_separation(
    g: &Multigraph,
    d: &RootedDecomposition,
    t1: &str,
    t2: &str,
    sep: &Separation,
) -> Result<Separation> {
    if !d.is_ancestor(t1, t2)? {
        return Err(Error::Precondition(format!("`{t1}` is not an ancestor of `{t2}`")));
    }
    if !d.bag(t1)?.is_subset(&sep.a) || !d.bag(t2)?.is_subset(&sep.b) {
        return Err(Error::Precondition(
            "the bags at t1 and t2 must lie in A and B respectively".into(),
        ));
    }
    sep.validate(g)?;
    let boundary = sep.boundary();
    let comps: Vec<VertexSet> = g.without(&boundary).components();
    let side_nodes: Vec<String> = {
        let mut out = Vec::new();
        for t in d.nodes() {
            if d.is_ancestor(t1, t)? && !d.is_ancestor(t, t2)? && !d.is_ancestor(t2, t)? {
                out.push(t.clone());
            }
        }
        out
    };
    let mut a = sep.a.clone();
    let mut b = sep.b.clone();
    let ud1 = up_down(d, t1)?;
    let ud2 = up_down(d, t2)?;
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > comps.len() + d.node_count() + 2 {
            return Err(Error::Internal("bad-node elimination failed to terminate".into()));
        }
        if !ud1.down.is_subset(&a) {
            for c in &comps {
                if c.iter().all(|v| ud1.down.contains(v) && !a.contains(v)) {
                    a.extend(c.iter().cloned());
                    for v in c {
                        b.remove(v);
                    }
                }
            }
            continue;
        }
        if !ud2.up.is_subset(&b) {
            for c in &comps {
                if c.iter().all(|v| ud2.up.contains(v) && !b.contains(v)) {
                    b.extend(c.iter().cloned());
                    for v in c {
                        a.remove(v);
                    }
                }
            }
            continue;
        }
        let mut moved = false;
        for s in &side_nodes {
            let bag = d.bag(s)?;
            let ud = up_down(d, s)?;
            let in_a = bag.is_subset(&a);
            let in_b = bag.is_subset(&b);
            if !(in_a || in_b) || ud.up.is_subset(&a) || ud.up.is_subset(&b) {
                continue;
            }
            if in_a {
                for c in &comps {
                    if c.iter().all(|v| ud.up.contains(v) && !a.contains(v)) {
                        a.extend(c.iter().cloned());
                        for v in c {
                            b.remove(v);
                        }
                    }
                }
            } else {
                for c in &comps {
                    if c.iter().all(|v| ud.up.contains(v) && !b.contains(v)) {
                        b.extend(c.iter().cloned());
                        for v in c {
                            a.remove(v);
                        }
                    }
                }
            }
            moved = true;
            break;
        }
        if !moved {
            break;
        }
    }
    let out = Separation::new(g, a, b)?;
    if out.boundary() != boundary {
        return Err(Error::Internal("shifting changed the boundary".into()));
    }
    verify_shifted(g, d, t1, t2, &out)?;
    Ok(out)
}

/// Checks conclusions (i)–(iii) of the shifting lemma verbatim (given the
/// intended boundary is the separation's own).
pub fn verify_shifted(
    g: &Multigraph,
    d: &RootedDecomposition,
    t1: &str,
    t2: &str,
    sep: &Separation,
) -> Result<()> {
    let _ = g;
    let ud1 = up_down(d, t1)?;
    let ud2 = up_down(d, t2)?;
    if !ud1.down.is_subset(&sep.a) {
        return Err(Error::Internal("↓t1 ⊆ A* fails".into()));
    }
    if !ud2.up.is_subset(&sep.b) {
        return Err(Error::Internal("↑t2 ⊆ B* fails".into()));
    }
    for s in d.nodes() {
        if !(d.is_ancestor(t1, s)? && !d.is_ancestor(s, t2)? && !d.is_ancestor(t2, s)?) {
            continue;
        }
        let bag = d.bag(s)?;
        if bag.is_subset(&sep.a) || bag.is_subset(&sep.b) {
            let ud = up_down(d, s)?;
            if !ud.up.is_subset(&sep.a) && !ud.up.is_subset(&sep.b) {
                return Err(Error::Internal(format!("side node `{s}` still bad")));
            }
        }
    }
    Ok(())
}

fn node_weight(br: Breadth) -> u128 {
    1u128 << (br.order * br.order + br.thickness)
}

/// Decides incorporation of a separation, returning a witness set normalized
/// so that no chosen node is an ancestor of another. Uses an exact
/// minimum-weight cover over the elements of B.
pub fn is_incorporated(
    g: &Multigraph,
    d: &RootedDecomposition,
    sep: &Separation,
) -> Result<Option<WitnessSet>> {
    let node_data = node_separations(g, d)?;
    is_incorporated_with(g, d, sep, &node_data)
}

/// Per-node separations with breadths, computed once for batched
/// incorporation queries.
pub fn node_separations(
    g: &Multigraph,
    d: &RootedDecomposition,
) -> Result<Vec<(String, Separation, Breadth)>> {
    let mut out = Vec::new();
    for t in d.nodes() {
        let st = separation_given_by(g, d, t)?;
        let (br, _) = breadth_of(g, &st)?;
        out.push((t.clone(), st, br));
    }
    Ok(out)
}

fn is_incorporated_with(
    g: &Multigraph,
    d: &RootedDecomposition,
    sep: &Separation,
    node_data: &[(String, Separation, Breadth)],
) -> Result<Option<WitnessSet>> {
    let (target, _) = breadth_of(g, sep)?;
    if target.order > 10 {
        return Err(Error::SearchCap("incorporation capped at order 10".into()));
    }
    let b_elems: Vec<String> = sep.b.iter().cloned().collect();
    if b_elems.len() > 22 {
        return Err(Error::SearchCap(format!(
            "incorporation cover over {} elements exceeds the cap",
            b_elems.len()
        )));
    }
    let cap: u128 = 1u128 << (target.order * target.order + target.thickness);
    let elem_idx: BTreeMap<&String, usize> = b_elems.iter().enumerate().map(|(i, v)| (v, i)).collect();
    // candidates: nodes with B_t ⊆ B and breadth at most the target,
    // deduplicated per coverage mask to the cheapest witness node
    let mut best_by_mask: BTreeMap<u64, (u128, String)> = BTreeMap::new();
    for (t, st, br) in node_data {
        if *br > target || !st.b.is_subset(&sep.b) {
            continue;
        }
        let mut mask = 0u64;
        for v in &st.b {
            mask |= 1 << elem_idx[v];
        }
        let w = node_weight(*br);
        let entry = (w, t.clone());
        match best_by_mask.get(&mask) {
            Some(old) if *old <= entry => {}
            _ => {
                best_by_mask.insert(mask, entry);
            }
        }
    }
    let cands: Vec<(String, u64, u128)> = best_by_mask
        .into_iter()
        .map(|(mask, (w, t))| (t, mask, w))
        .collect();
    let full: u64 = if b_elems.len() == 64 { !0 } else { (1u64 << b_elems.len()) - 1 };
    let mut dp: BTreeMap<u64, (u128, Vec<usize>)> = BTreeMap::new();
    dp.insert(0, (0, Vec::new()));
    // iterate to fixpoint over candidates (order-insensitive cover DP)
    let mut frontier: Vec<u64> = vec![0];
    while let Some(mask) = frontier.pop() {
        let (w, picks) = dp[&mask].clone();
        for (ci, (_, cmask, cw)) in cands.iter().enumerate() {
            let nm = mask | cmask;
            if nm == mask {
                continue;
            }
            let nw = w + cw;
            if nw > cap {
                continue;
            }
            let better = match dp.get(&nm) {
                None => true,
                Some((old, _)) => nw < *old,
            };
            if better {
                let mut np = picks.clone();
                np.push(ci);
                dp.insert(nm, (nw, np));
                frontier.push(nm);
            }
        }
    }
    let Some((w, picks)) = dp.get(&full) else {
        return Ok(None);
    };
    if *w > cap {
        return Ok(None);
    }
    let mut nodes: Vec<String> = picks.iter().map(|&i| cands[i].0.clone()).collect();
    nodes.sort();
    nodes.dedup();
    // drop nodes that have an ancestor in the set
    let mut kept: Vec<String> = Vec::new();
    let mut by_depth = nodes.clone();
    by_depth.sort_by_key(|t| (d.depth_of(t).unwrap(), t.clone()));
    for t in by_depth {
        if !kept.iter().any(|p| d.is_ancestor(p, &t).unwrap()) {
            kept.push(t);
        }
    }
    kept.sort();
    // re-verify INC1-INC3 on the normalized witness
    let mut covered = VertexSet::new();
    let mut total: u128 = 0;
    for t in &kept {
        let st = separation_given_by(g, d, t)?;
        let (br, _) = breadth_of(g, &st)?;
        if br > target {
            return Err(Error::Internal("witness violates INC1".into()));
        }
        covered.extend(st.b.iter().cloned());
        total += node_weight(br);
    }
    if covered != sep.b || total > cap {
        return Err(Error::Internal("witness normalization broke the cover".into()));
    }
    Ok(Some(WitnessSet { nodes: kept }))
}

/// Exact signature by enumerating every separation of order ≤ max_order.
pub fn signature(g: &Multigraph, d: &RootedDecomposition, max_order: usize) -> Result<Signature> {
    if g.n() > 14 {
        return Err(Error::SizeGuard {
            what: "signature enumeration",
            size: g.n(),
            limit: 14,
        });
    }
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for i in 0..=max_order {
        for j in 0..=i {
            counts.insert((i, j), 0);
        }
    }
    let node_data = node_separations(g, d)?;
    for sep in enumerate_separations(g, max_order)? {
        let (br, _) = breadth_of(g, &sep)?;
        if br.order > max_order {
            continue;
        }
        if is_incorporated_with(g, d, &sep, &node_data)?.is_some() {
            *counts.get_mut(&(br.order, br.thickness)).unwrap() += 1;
        }
    }
    Ok(Signature { max_order, counts })
}

fn copy_name(prefix: &str, t: &str) -> String {
    format!("{prefix}{t}")
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Node (containing v) minimizing distance to the path aTb, canonical ties.
fn nearest_holder(d: &RootedDecomposition, v: &str, a: &str, b: &str) -> Result<String> {
    let mut best: Option<(usize, String)> = None;
    for (t, bag) in d.bags() {
        if bag.contains(v) {
            let dist = d.distance_to_path(t, a, b)?;
            let key = (dist, t.clone());
            if best.as_ref().map_or(true, |bk| key < *bk) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, t)| t)
        .ok_or_else(|| Error::Internal(format!("vertex `{v}` in no bag")))
}

/// The linkedness-improvement construction: rebuilds the decomposition around
/// a shifted minimal separation witnessing the violation, so the separation
/// becomes realized by a new node.
pub fn improve_unlinked(
    g: &Multigraph,
    d: &RootedDecomposition,
    t1: &str,
    t2: &str,
    sep: &Separation,
) -> Result<RootedDecomposition> {
    if !is_precursor(d, t1, t2)? {
        return Err(Error::Precondition(format!("`{t1}` is not a precursor of `{t2}`")));
    }
    let k = d.bag(t1)?.len();
    if sep.order() >= k {
        return Err(Error::Precondition("witness separation must have order below the bag size".into()));
    }
    verify_shifted(g, d, t1, t2, sep)?;
    // order minimality
    let flow = max_disjoint_paths(g, d.bag(t1)?, d.bag(t2)?)?.len();
    if sep.order() != flow {
        return Err(Error::Precondition(format!(
            "witness order {} is not minimal ({flow})",
            sep.order()
        )));
    }
    let boundary = sep.boundary();
    let dist_sum = |s: &Separation| -> Result<usize> {
        let mut sum = 0;
        for v in s.boundary() {
            let t = nearest_holder(d, &v, t1, t2)?;
            sum += d.distance_to_path(&t, t1, t2)?;
        }
        Ok(sum)
    };
    let my_sum = dist_sum(sep)?;
    for other in enumerate_separations(g, sep.order())? {
        if other.order() != sep.order() {
            continue;
        }
        let ud1 = up_down(d, t1)?;
        let ud2 = up_down(d, t2)?;
        if !ud1.down.is_subset(&other.a) || !ud2.up.is_subset(&other.b) {
            continue;
        }
        if dist_sum(&other)? < my_sum {
            return Err(Error::Precondition(
                "witness separation does not minimize the distance sum".into(),
            ));
        }
    }
    // construction
    let taken: BTreeSet<String> = d
        .nodes()
        .flat_map(|t| [copy_name("L.", t), copy_name("R.", t)])
        .collect();
    let cut_node = fresh_name("cut", &taken);
    let mut bags: BTreeMap<String, VertexSet> = BTreeMap::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let holders: BTreeMap<String, String> = boundary
        .iter()
        .map(|v| Ok((v.clone(), nearest_holder(d, v, t1, t2)?)))
        .collect::<Result<_>>()?;
    let on_path = |t: &str, a: &str, b: &str| -> Result<bool> {
        Ok(d.tree_path(a, b)?.iter().any(|x| x == t))
    };
    for t in d.nodes() {
        let mut left: VertexSet = d.bag(t)?.intersection(&sep.a).cloned().collect();
        for v in &boundary {
            if on_path(t, &holders[v], t2)? {
                left.insert(v.clone());
            }
        }
        bags.insert(copy_name("L.", t), left);
    }
    for t in d.descendants(t1)? {
        let mut right: VertexSet = d.bag(&t)?.intersection(&sep.b).cloned().collect();
        for v in &boundary {
            if on_path(&t, t1, &holders[v])? {
                right.insert(v.clone());
            }
        }
        bags.insert(copy_name("R.", &t), right);
    }
    bags.insert(cut_node.clone(), boundary.clone());
    for (p, c) in d.tree_edges() {
        edges.push((copy_name("L.", &p), copy_name("L.", &c)));
        if d.is_ancestor(t1, &p)? {
            edges.push((copy_name("R.", &p), copy_name("R.", &c)));
        }
    }
    edges.push((copy_name("L.", t2), cut_node.clone()));
    edges.push((cut_node.clone(), copy_name("R.", t1)));
    let out = RootedDecomposition::new(copy_name("L.", d.root()), bags, &edges)?;
    if let Err(v) = validate(g, &out) {
        return Err(Error::Internal(format!("improved decomposition invalid: {v:?}")));
    }
    if metrics(&out).width > metrics(d).width {
        return Err(Error::Internal("improvement increased the width".into()));
    }
    let realized = separation_given_by(g, &out, &cut_node)?;
    if realized != *sep {
        return Err(Error::Internal("new node does not realize the witness separation".into()));
    }
    Ok(out)
}

/// Subdivides every tree edge with non-nested bags once, with the
/// intersection as the new bag.
pub fn normalize_edges(g: &Multigraph, d: &RootedDecomposition) -> Result<RootedDecomposition> {
    let taken: BTreeSet<String> = d.nodes().cloned().collect();
    let mut bags: BTreeMap<String, VertexSet> = d.bags().clone();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (p, c) in d.tree_edges() {
        let bp = d.bag(&p)?;
        let bc = d.bag(&c)?;
        if bp.is_subset(bc) || bc.is_subset(bp) {
            edges.push((p, c));
        } else {
            let mid = fresh_name(&format!("{p}~{c}"), &taken);
            bags.insert(mid.clone(), bp.intersection(bc).cloned().collect());
            edges.push((p, mid.clone()));
            edges.push((mid, c));
        }
    }
    let out = RootedDecomposition::new(d.root().to_string(), bags, &edges)?;
    if let Err(v) = validate(g, &out) {
        return Err(Error::Internal(format!("normalization broke the decomposition: {v:?}")));
    }
    Ok(out)
}

/// A linkedness violation: a precursor pair and a minimal shifted separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnlinkedViolation {
    pub t1: String,
    pub t2: String,
    pub sep: Separation,
}

/// Shared mask-level cache for the violation scans: per-node separations,
/// pointedness data and flow memoization over a fixed decomposition.
struct ScanCache<'a> {
    view: crate::decomp::DecompView<'a>,
    /// per node: boundary vertex index -> (edges into A-B, edges into B-A)
    counts: Vec<BTreeMap<usize, (usize, usize)>>,
    breadths: Vec<Breadth>,
    bnd: Vec<u64>,
    flow_memo: std::cell::RefCell<std::collections::HashMap<(u64, u64), usize>>,
}

impl<'a> ScanCache<'a> {
    fn new(g: &'a Multigraph, d: &'a RootedDecomposition) -> Result<Self> {
        let view = crate::decomp::DecompView::new(g, d)?;
        let mut counts = Vec::new();
        let mut breadths = Vec::new();
        let mut bnd = Vec::new();
        for i in 0..view.node_count() {
            let sep = view.separation_idx(i);
            let (br, flags) = breadth_of(g, &sep)?;
            let mut m = BTreeMap::new();
            let mut bm = 0u64;
            for f in &flags {
                let vi = g.vertex_index(&f.vertex)?;
                m.insert(vi, (f.edges_into_a, f.edges_into_b));
                bm |= 1 << vi;
            }
            counts.push(m);
            breadths.push(br);
            bnd.push(bm);
        }
        Ok(ScanCache {
            view,
            counts,
            breadths,
            bnd,
            flow_memo: Default::default(),
        })
    }

    fn flow(&self, from: u64, to: u64) -> Result<usize> {
        if let Some(&v) = self.flow_memo.borrow().get(&(from, to)) {
            return Ok(v);
        }
        let x = self.view.g.from_mask(from);
        let y = self.view.g.from_mask(to);
        let v = max_disjoint_paths(self.view.g, &x, &y)?.len();
        self.flow_memo.borrow_mut().insert((from, to), v);
        Ok(v)
    }

    /// Mask of vertices separated from ↓t by some node separation with
    /// breadth strictly below `limit` (or order strictly below, when
    /// `by_order` is set).
    fn separated_mask(&self, t: usize, limit: Breadth, by_order: bool) -> u64 {
        let down = self.view.down[t];
        let mut out = 0u64;
        for j in 0..self.view.node_count() {
            let small = if by_order {
                self.breadths[j].order < limit.order
            } else {
                self.breadths[j] < limit
            };
            if !small {
                continue;
            }
            let b = self.bnd[j];
            if down & !b == 0 {
                continue; // ↓t inside the boundary: separates nothing
            }
            let a_side = self.view.down[j];
            let b_side = self.view.up[j];
            if down & !b_side == 0 {
                out |= a_side & !b;
            }
            if down & !a_side == 0 {
                out |= b_side & !b;
            }
        }
        out
    }

    /// The coherence test for a shared bag vertex of two node separations.
    fn coherent(&self, v: usize, i0: usize, i3: usize) -> bool {
        let (a1, b1) = self.counts[i0][&v];
        let (a2, b2) = self.counts[i3][&v];
        let first = a1 > 1 || (a1 == a2 && a1 <= 1);
        let second = b2 > 1 || (b1 == b2 && b2 <= 1);
        first && second
    }
}

/// Brute-force linkedness check; returns the first violation in canonical
/// order, already minimized and shifted.
pub fn find_unlinked_violation(
    g: &Multigraph,
    d: &RootedDecomposition,
    n_param: usize,
) -> Result<Option<UnlinkedViolation>> {
    let cache = ScanCache::new(g, d)?;
    let n_nodes = cache.view.node_count();
    let mut sep_mask_memo: BTreeMap<usize, u64> = BTreeMap::new();
    for i1 in 0..n_nodes {
        for i2 in 0..n_nodes {
            if !cache.view.is_precursor_idx(i1, i2) {
                continue;
            }
            let k = cache.view.bags[i1].count_ones() as usize;
            if cache.flow(cache.view.bags[i1], cache.view.bags[i2])? >= k {
                continue;
            }
            let blocked = *sep_mask_memo.entry(i1).or_insert_with(|| {
                cache.separated_mask(
                    i1,
                    Breadth {
                        order: k,
                        thickness: 0,
                    },
                    true,
                )
            });
            let free = (cache.view.up[i2] & !blocked).count_ones() as usize;
            if free < n_param {
                continue;
            }
            let t1 = cache.view.names[i1].clone();
            let t2 = cache.view.names[i2].clone();
            // minimal order, then minimal distance sum, then canonical
            let ud1 = up_down(d, &t1)?;
            let ud2 = up_down(d, &t2)?;
            let mut best: Option<(usize, usize, Separation)> = None;
            for sep in enumerate_separations(g, k - 1)? {
                if !ud1.down.is_subset(&sep.a) || !ud2.up.is_subset(&sep.b) {
                    continue;
                }
                let mut sum = 0;
                for v in sep.boundary() {
                    let t = nearest_holder(d, &v, &t1, &t2)?;
                    sum += d.distance_to_path(&t, &t1, &t2)?;
                }
                let key = (sep.order(), sum, sep.clone());
                if best.as_ref().map_or(true, |b| key < *b) {
                    best = Some(key);
                }
            }
            let (_, _, sep) = best.ok_or_else(|| {
                Error::Internal("flow found a small cut but enumeration did not".into())
            })?;
            let shifted = shift_separation(g, d, &t1, &t2, &sep)?;
            return Ok(Some(UnlinkedViolation { t1, t2, sep: shifted }));
        }
    }
    Ok(None)
}

pub fn is_n_linked(g: &Multigraph, d: &RootedDecomposition, n_param: usize) -> Result<bool> {
    Ok(find_unlinked_violation(g, d, n_param)?.is_none())
}

/// An integration violation: the four-node chain and the strongly-separating
/// witness separation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnintegratedViolation {
    pub chain: [String; 4],
    pub sep: Separation,
}

/// Common hypothesis bundle of the integration definition for one chain.
struct ChainData {
    sizes_ok: bool,
    common: VertexSet,
    paths: Option<Vec<Vec<String>>>,
}

fn chain_data(
    g: &Multigraph,
    d: &RootedDecomposition,
    chain: &[String; 4],
) -> Result<ChainData> {
    let b: Vec<&VertexSet> = chain.iter().map(|t| d.bag(t).unwrap()).collect();
    let k = b[0].len();
    let sizes_ok = b.iter().all(|x| x.len() == k);
    let mut common = b[0].clone();
    for x in &b[1..] {
        common = common.intersection(x).cloned().collect();
    }
    if !sizes_ok {
        return Ok(ChainData {
            sizes_ok,
            common,
            paths: None,
        });
    }
    // pairwise intersections all equal to the common one
    for i in 0..4 {
        for j in (i + 1)..4 {
            let inter: VertexSet = b[i].intersection(b[j]).cloned().collect();
            if inter != common {
                return Ok(ChainData {
                    sizes_ok: false,
                    common,
                    paths: None,
                });
            }
        }
    }
    let sys = max_disjoint_paths(g, b[0], b[3])?;
    let paths = if sys.len() == k { Some(sys.paths) } else { None };
    Ok(ChainData {
        sizes_ok,
        common,
        paths,
    })
}

/// Brute-force integration check; returns the first violation in canonical
/// order.
pub fn find_unintegrated_violation(
    g: &Multigraph,
    d: &RootedDecomposition,
    n_param: usize,
) -> Result<Option<UnintegratedViolation>> {
    let cache = ScanCache::new(g, d)?;
    let n_nodes = cache.view.node_count();
    let max_order = d.bags().values().map(|b| b.len()).max().unwrap_or(0);
    // enumerated separations with cached masks and pointedness
    struct SepData {
        sep: Separation,
        br: Breadth,
        a: u64,
        b: u64,
        bnd: u64,
        pointed: u64,
    }
    let mut seps: Vec<SepData> = Vec::new();
    for sep in enumerate_separations(g, max_order)? {
        let (br, flags) = breadth_of(g, &sep)?;
        let a = g.to_mask(&sep.a)?;
        let b = g.to_mask(&sep.b)?;
        let mut pointed = 0u64;
        for f in &flags {
            if f.pointed {
                pointed |= 1 << g.vertex_index(&f.vertex)?;
            }
        }
        seps.push(SepData {
            sep,
            br,
            a,
            b,
            bnd: a & b,
            pointed,
        });
    }
    let descendants: Vec<Vec<usize>> = (0..n_nodes)
        .map(|i| (0..n_nodes).filter(|&j| cache.view.ancestor[i][j]).collect())
        .collect();
    let mut blocked_memo: BTreeMap<(usize, Breadth), u64> = BTreeMap::new();
    for i0 in 0..n_nodes {
        for &i1 in &descendants[i0] {
            for &i2 in &descendants[i1] {
                for &i3 in &descendants[i2] {
                    let bags = [
                        cache.view.bags[i0],
                        cache.view.bags[i1],
                        cache.view.bags[i2],
                        cache.view.bags[i3],
                    ];
                    let k = bags[0].count_ones();
                    if bags.iter().any(|b| b.count_ones() != k) {
                        continue;
                    }
                    let common = bags[0] & bags[1] & bags[2] & bags[3];
                    let mut pairwise_ok = true;
                    for x in 0..4 {
                        for y in (x + 1)..4 {
                            if bags[x] & bags[y] != common {
                                pairwise_ok = false;
                            }
                        }
                    }
                    if !pairwise_ok {
                        continue;
                    }
                    // coherence of the common vertices for the chain's ends
                    let mut coherent = true;
                    for v in 0..g.n() {
                        if common & (1 << v) != 0 && !cache.coherent(v, i0, i3) {
                            coherent = false;
                            break;
                        }
                    }
                    if !coherent {
                        continue;
                    }
                    if cache.flow(bags[0], bags[3])? != k as usize {
                        continue;
                    }
                    // thickness pinned by the chain's bottom separation
                    let mut kk = 0usize;
                    for v in 0..g.n() {
                        if common & (1 << v) != 0 && cache.counts[i3][&v].0 >= 2 {
                            kk += 1;
                        }
                    }
                    let target = Breadth {
                        order: k as usize,
                        thickness: kk,
                    };
                    // a strongly separating witness of exactly that breadth
                    let down1 = cache.view.down[i1];
                    let up2 = cache.view.up[i2];
                    let uv = down1 & up2;
                    let mut witness = None;
                    for sd in &seps {
                        if sd.br != target {
                            continue;
                        }
                        if down1 & !sd.a != 0 || up2 & !sd.b != 0 {
                            continue;
                        }
                        let outside = sd.bnd & !uv;
                        if outside & !sd.pointed != 0 || outside & down1 != 0 {
                            continue;
                        }
                        witness = Some(sd.sep.clone());
                        break;
                    }
                    let Some(wsep) = witness else { continue };
                    // enough vertices above the chain unseparated at smaller breadth
                    let blocked = *blocked_memo
                        .entry((i0, target))
                        .or_insert_with(|| cache.separated_mask(i0, target, false));
                    let free = (cache.view.up[i3] & !blocked).count_ones() as usize;
                    if free < n_param {
                        continue;
                    }
                    // a node on the chain realizing the breadth satisfies the
                    // property
                    let on_path = cache.view.path_between(i0, i3);
                    if on_path.iter().any(|&t| cache.breadths[t] == target) {
                        continue;
                    }
                    return Ok(Some(UnintegratedViolation {
                        chain: [
                            cache.view.names[i0].clone(),
                            cache.view.names[i1].clone(),
                            cache.view.names[i2].clone(),
                            cache.view.names[i3].clone(),
                        ],
                        sep: wsep,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_n_integrated(g: &Multigraph, d: &RootedDecomposition, n_param: usize) -> Result<bool> {
    Ok(find_unintegrated_violation(g, d, n_param)?.is_none())
}

/// Histogram of side-node distances used for the second minimization
/// criterion; compared high-distance-first.
fn g_badness_key(ds: &[usize], max_d: usize) -> Vec<u32> {
    let mut hist = vec![0u32; max_d + 1];
    for &x in ds {
        hist[max_d - x] += 1;
    }
    hist
}

struct PairCandidate {
    a1b1: Separation,
    a2b2: Separation,
    f_bad: usize,
    g_key: Vec<u32>,
    h_bad: usize,
}

/// The integration-improvement construction from the four-node chain and the
/// strongly-separating breadth witness.
pub fn improve_unintegrated(
    g: &Multigraph,
    d: &RootedDecomposition,
    chain: &[String; 4],
    sep: &Separation,
) -> Result<(RootedDecomposition, Separation)> {
    let [t0, t1, t2, t3] = chain;
    for w in chain.windows(2) {
        if !d.is_ancestor(&w[0], &w[1])? {
            return Err(Error::Precondition(format!(
                "`{}` is not an ancestor of `{}`",
                w[0], w[1]
            )));
        }
    }
    let data = chain_data(g, d, chain)?;
    if !data.sizes_ok {
        return Err(Error::Precondition("bag sizes or intersections violate the hypotheses".into()));
    }
    let Some(paths) = data.paths else {
        return Err(Error::Precondition("the full disjoint path family is missing".into()));
    };
    for v in &data.common {
        if !crate::decomp::coherent_for(g, d, v, t0, t3)? {
            return Err(Error::Precondition(format!("vertex `{v}` is not coherent for t0,t3")));
        }
    }
    let ud0 = up_down(d, t0)?;
    let ud1 = up_down(d, t1)?;
    let ud2 = up_down(d, t2)?;
    let ud3 = up_down(d, t3)?;
    let (target, _) = breadth_of(g, sep)?;
    if !separation_predicates(g, sep, &ud1.down, &ud2.up)?.strongly_separates {
        return Err(Error::Precondition("the witness does not strongly separate ↓t1, ↑t2".into()));
    }
    for t in d.tree_path(t0, t3)? {
        let st = separation_given_by(g, d, &t)?;
        let (br, _) = breadth_of(g, &st)?;
        if br == target {
            return Err(Error::Precondition(format!(
                "node `{t}` on the chain already realizes the breadth"
            )));
        }
    }
    let z: VertexSet = d.bag(t0)?.intersection(d.bag(t3)?).cloned().collect();
    let mut path_union = VertexSet::new();
    for p in &paths {
        path_union.extend(p.iter().cloned());
    }
    let g_a: VertexSet = ud0
        .down
        .union(&ud1.down.intersection(&path_union).cloned().collect())
        .cloned()
        .collect();
    let g_b: VertexSet = ud3
        .up
        .union(&ud2.up.intersection(&path_union).cloned().collect())
        .cloned()
        .collect();

    // enumerate reflection pairs satisfying (a)-(e), minimizing the
    // (f),(g),(h) badness triple
    let side_nodes: Vec<String> = {
        let mut out = Vec::new();
        for t in d.nodes() {
            if d.is_ancestor(t0, t)? && !d.is_ancestor(t, t3)? && !d.is_ancestor(t3, t)? {
                out.push(t.clone());
            }
        }
        out
    };
    let max_depth = side_nodes
        .iter()
        .map(|t| d.distance_to_path(t, t0, t3).unwrap())
        .max()
        .unwrap_or(0);
    let mut best: Option<PairCandidate> = None;
    let mut budget = 0usize;
    for a2b2 in enumerate_separations(g, target.order)? {
        budget += 1;
        if budget > 2_000_000 {
            return Err(Error::SearchCap("reflection pair search exceeded its budget".into()));
        }
        let (br2, flags2) = breadth_of(g, &a2b2)?;
        if br2 != target {
            continue;
        }
        if !separation_predicates(g, &a2b2, &ud0.down, &ud3.up)?.strongly_separates {
            continue;
        }
        if !g_a.is_subset(&a2b2.a) {
            continue;
        }
        let boundary2 = a2b2.boundary();
        let doubly: Vec<String> = flags2
            .iter()
            .filter(|f| f.doubly_pointed && !z.contains(&f.vertex))
            .map(|f| f.vertex.clone())
            .collect();
        for wmask in 0u64..(1 << doubly.len().min(16)) {
            let w: VertexSet = doubly
                .iter()
                .enumerate()
                .filter(|(i, _)| wmask & (1 << i) != 0)
                .map(|(_, v)| v.clone())
                .collect();
            let outside: VertexSet = boundary2
                .iter()
                .filter(|v| !z.contains(*v) && !w.contains(*v))
                .cloned()
                .collect();
            let w_adj_bad = g.edges().iter().any(|(x, y)| {
                (w.contains(x) && outside.contains(y)) || (w.contains(y) && outside.contains(x))
            });
            if w_adj_bad {
                continue;
            }
            let Ok(a1b1) = reflection(g, &a2b2, &z, &w) else { continue };
            // (b): anti-pointedness of the reflected boundary off Z
            let (_, flags1) = breadth_of(g, &a1b1)?;
            if !flags1.iter().all(|f| z.contains(&f.vertex) || f.anti_pointed) {
                continue;
            }
            // (c)
            if !ud0.down.is_subset(&a1b1.a) || !ud3.up.is_subset(&a2b2.b) {
                continue;
            }
            // (d)
            if !g_b.is_subset(&a1b1.b) {
                continue;
            }
            // (e): side condition over descendants of t0 not ancestors of t3
            let mut e_ok = true;
            for t in d.nodes() {
                if !(d.is_ancestor(t0, t)? && !d.is_ancestor(t, t3)?) {
                    continue;
                }
                let bag = d.bag(t)?;
                if bag.is_subset(&a1b1.a) || bag.is_subset(&a2b2.b) {
                    let ud = up_down(d, t)?;
                    if !ud.up.is_subset(&a1b1.a) && !ud.up.is_subset(&a2b2.b) {
                        e_ok = false;
                        break;
                    }
                }
            }
            if !e_ok {
                continue;
            }
            // badness triple
            let bnd1 = a1b1.boundary();
            let bnd2 = a2b2.boundary();
            let both: VertexSet = bnd1.intersection(&bnd2).cloned().collect();
            let mut f_bad_nodes: BTreeSet<String> = BTreeSet::new();
            for t in &side_nodes {
                let at = &up_down(d, t)?.down;
                let cond1 = both.iter().any(|v| !at.contains(v));
                let cond2 = g.edges().iter().any(|(x, y)| {
                    let ux = bnd1.contains(x) && !bnd2.contains(x) && !at.contains(x);
                    let vy = bnd2.contains(y) && !bnd1.contains(y) && !at.contains(y);
                    let uy = bnd1.contains(y) && !bnd2.contains(y) && !at.contains(y);
                    let vx = bnd2.contains(x) && !bnd1.contains(x) && !at.contains(x);
                    (ux && vy) || (uy && vx)
                });
                if cond1 || cond2 {
                    f_bad_nodes.insert(t.clone());
                }
            }
            let mut g_bad_dists = Vec::new();
            for t in &side_nodes {
                if f_bad_nodes.contains(t) {
                    continue;
                }
                let at = &up_down(d, t)?.down;
                let bag = d.bag(t)?;
                let bullet = |c2d2: &Separation, c1d1: &Separation| -> bool {
                    let b2 = c2d2.boundary();
                    let b1 = c1d1.boundary();
                    b2.iter().any(|v| {
                        bag.contains(v)
                            && !b1.contains(v)
                            && g.edges().iter().any(|(x, y)| {
                                let other = if x == v { y } else if y == v { x } else { return false };
                                b1.contains(other) && !b2.contains(other) && !at.contains(other)
                            })
                            && g.edges().iter().any(|(x, y)| {
                                let other = if x == v { y } else if y == v { x } else { return false };
                                c2d2.b.contains(other)
                                    && !c2d2.a.contains(other)
                                    && !at.contains(other)
                                    && !path_union.contains(other)
                            })
                    })
                };
                let swap_bullet = |c1d1: &Separation, c2d2: &Separation| -> bool {
                    let b1 = c1d1.boundary();
                    let b2 = c2d2.boundary();
                    b1.iter().any(|v| {
                        bag.contains(v)
                            && !b2.contains(v)
                            && g.edges().iter().any(|(x, y)| {
                                let other = if x == v { y } else if y == v { x } else { return false };
                                b2.contains(other) && !b1.contains(other) && !at.contains(other)
                            })
                            && g.edges().iter().any(|(x, y)| {
                                let other = if x == v { y } else if y == v { x } else { return false };
                                c1d1.a.contains(other)
                                    && !c1d1.b.contains(other)
                                    && !at.contains(other)
                                    && !path_union.contains(other)
                            })
                    })
                };
                if bullet(&a2b2, &a1b1) || swap_bullet(&a1b1, &a2b2) {
                    g_bad_dists.push(d.distance_to_path(t, t0, t3)?);
                }
            }
            let mut h_bad = 0;
            for t in &side_nodes {
                let at = &up_down(d, t)?.down;
                if bnd1.iter().any(|v| !at.contains(v)) || bnd2.iter().any(|v| !at.contains(v)) {
                    h_bad += 1;
                }
            }
            let cand = PairCandidate {
                a1b1,
                a2b2: a2b2.clone(),
                f_bad: f_bad_nodes.len(),
                g_key: g_badness_key(&g_bad_dists, max_depth),
                h_bad,
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    (cand.f_bad, &cand.g_key, cand.h_bad, &cand.a1b1, &cand.a2b2)
                        < (b.f_bad, &b.g_key, b.h_bad, &b.a1b1, &b.a2b2)
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    let Some(pair) = best else {
        return Err(Error::SearchCap(
            "no reflection pair satisfying the side conditions was found".into(),
        ));
    };
    build_integrated(g, d, chain, &pair.a1b1, &pair.a2b2)
}

fn build_integrated(
    g: &Multigraph,
    d: &RootedDecomposition,
    chain: &[String; 4],
    a1b1: &Separation,
    a2b2: &Separation,
) -> Result<(RootedDecomposition, Separation)> {
    let [t0, _, _, t3] = chain;
    let bnd1 = a1b1.boundary();
    let bnd2 = a2b2.boundary();
    let us: Vec<String> = bnd1.difference(&bnd2).cloned().collect();
    let vs_all: VertexSet = bnd2.difference(&bnd1).cloned().collect();
    // the cross edges form a perfect matching u_i -- v_i
    let mut vs: Vec<String> = Vec::new();
    for u in &us {
        let mut partners: Vec<String> = g
            .edges()
            .iter()
            .filter_map(|(x, y)| {
                if x == u && vs_all.contains(y) {
                    Some(y.clone())
                } else if y == u && vs_all.contains(x) {
                    Some(x.clone())
                } else {
                    None
                }
            })
            .collect();
        partners.sort();
        partners.dedup();
        if partners.len() != 1 {
            return Err(Error::Internal(format!(
                "boundary vertex `{u}` has {} partners across the reflection",
                partners.len()
            )));
        }
        vs.push(partners[0].clone());
    }
    {
        let distinct: BTreeSet<&String> = vs.iter().collect();
        if distinct.len() != vs.len() || vs.len() != vs_all.len() {
            return Err(Error::Internal("reflection edges are not a perfect matching".into()));
        }
    }
    let k = us.len();
    let taken: BTreeSet<String> = d
        .nodes()
        .flat_map(|t| [copy_name("L.", t), copy_name("R.", t)])
        .collect();
    let qname = |i: usize| fresh_name(&format!("q{i}"), &taken);
    let mut bags: BTreeMap<String, VertexSet> = BTreeMap::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let holders1: BTreeMap<String, String> = bnd1
        .iter()
        .map(|v| Ok((v.clone(), nearest_holder(d, v, t0, t3)?)))
        .collect::<Result<_>>()?;
    let holders2: BTreeMap<String, String> = bnd2
        .iter()
        .map(|v| Ok((v.clone(), nearest_holder(d, v, t0, t3)?)))
        .collect::<Result<_>>()?;
    let on_path = |t: &str, a: &str, b: &str| -> Result<bool> {
        Ok(d.tree_path(a, b)?.iter().any(|x| x == t))
    };
    for t in d.nodes() {
        let mut left: VertexSet = d.bag(t)?.intersection(&a1b1.a).cloned().collect();
        for v in &bnd1 {
            if on_path(t, &holders1[v], t3)? {
                left.insert(v.clone());
            }
        }
        bags.insert(copy_name("L.", t), left);
    }
    for t in d.descendants(t0)? {
        let mut right: VertexSet = d.bag(&t)?.intersection(&a2b2.b).cloned().collect();
        for v in &bnd2 {
            if on_path(&t, t0, &holders2[v])? {
                right.insert(v.clone());
            }
        }
        bags.insert(copy_name("R.", &t), right);
    }
    let four_way: VertexSet = bnd1.intersection(&bnd2).cloned().collect();
    bags.insert(qname(0), bnd1.clone());
    bags.insert(qname(k + 1), bnd2.clone());
    for i in 1..=k {
        let mut bag = four_way.clone();
        for v in vs.iter().take(i) {
            bag.insert(v.clone());
        }
        for u in us.iter().skip(i - 1) {
            bag.insert(u.clone());
        }
        bags.insert(qname(i), bag);
    }
    for (p, c) in d.tree_edges() {
        edges.push((copy_name("L.", &p), copy_name("L.", &c)));
        if d.is_ancestor(t0, &p)? {
            edges.push((copy_name("R.", &p), copy_name("R.", &c)));
        }
    }
    edges.push((copy_name("L.", t3), qname(0)));
    for i in 0..=k {
        edges.push((qname(i), qname(i + 1)));
    }
    edges.push((qname(k + 1), copy_name("R.", t0)));
    let out = RootedDecomposition::new(copy_name("L.", d.root()), bags, &edges)?;
    if let Err(v) = validate(g, &out) {
        return Err(Error::Internal(format!("improved decomposition invalid: {v:?}")));
    }
    if metrics(&out).width > metrics(d).width {
        return Err(Error::Internal("improvement increased the width".into()));
    }
    let realized = separation_given_by(g, &out, &qname(k + 1))?;
    if realized != *a2b2 {
        return Err(Error::Internal("the new path does not realize the witness separation".into()));
    }
    Ok((out, realized))
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub step: String,
    pub witness: serde_json::Value,
    pub signature: Vec<(usize, usize, u64)>,
}

#[derive(Debug)]
pub struct DriverOutput {
    pub decomposition: RootedDecomposition,
    pub trace: Vec<TraceStep>,
}

/// Iterates improvement steps until the decomposition is linked, integrated
/// and nested, recording per-step signatures.
pub fn refine_driver(
    g: &Multigraph,
    initial: &RootedDecomposition,
    n_param: usize,
    max_order: usize,
    step_limit: usize,
) -> Result<DriverOutput> {
    if let Err(v) = validate(g, initial) {
        return Err(Error::Precondition(format!("initial decomposition invalid: {v:?}")));
    }
    let mut d = initial.clone();
    let mut trace = Vec::new();
    for _ in 0..step_limit {
        if let Some(v) = find_unlinked_violation(g, &d, n_param)? {
            d = improve_unlinked(g, &d, &v.t1, &v.t2, &v.sep)?;
            trace.push(TraceStep {
                step: "unlinked".into(),
                witness: serde_json::to_value(&v).expect("serializable witness"),
                signature: signature(g, &d, max_order)?.flat(),
            });
            continue;
        }
        if let Some(v) = find_unintegrated_violation(g, &d, n_param)? {
            let (nd, _) = improve_unintegrated(g, &d, &v.chain, &v.sep)?;
            d = nd;
            trace.push(TraceStep {
                step: "unintegrated".into(),
                witness: serde_json::to_value(&v).expect("serializable witness"),
                signature: signature(g, &d, max_order)?.flat(),
            });
            continue;
        }
        if !metrics(&d).nested_edges {
            d = normalize_edges(g, &d)?;
            trace.push(TraceStep {
                step: "normalize".into(),
                witness: serde_json::Value::Null,
                signature: signature(g, &d, max_order)?.flat(),
            });
            continue;
        }
        return Ok(DriverOutput {
            decomposition: d,
            trace,
        });
    }
    Err(Error::StepLimit(step_limit))
}
