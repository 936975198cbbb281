//! Separations with the order/thickness/breadth calculus, pseudo-edge-cuts
//! and reflections.
//!
//! Loops at a boundary vertex contribute to neither pointedness count: a
//! loop's other end is the vertex itself, which lies in the boundary.
//! Parallel edges count with multiplicity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};

/// An ordered pair of vertex subsets covering the host with no edge from
/// A−B to B−A.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Separation {
    #[serde(rename = "A")]
    pub a: VertexSet,
    #[serde(rename = "B")]
    pub b: VertexSet,
}

/// (order, thickness), compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Breadth {
    pub order: usize,
    pub thickness: usize,
}

/// Per-vertex pointedness flags for a separation's boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFlags {
    pub vertex: String,
    pub edges_into_a: usize,
    pub edges_into_b: usize,
    pub pointed: bool,
    pub anti_pointed: bool,
    pub doubly_pointed: bool,
}

impl Separation {
    pub fn new(host: &Multigraph, a: VertexSet, b: VertexSet) -> Result<Self> {
        let s = Separation { a, b };
        s.validate(host)?;
        Ok(s)
    }

    pub fn validate(&self, host: &Multigraph) -> Result<()> {
        for v in self.a.iter().chain(self.b.iter()) {
            host.vertex_index(v)?;
        }
        if self.a.union(&self.b).count() != host.n() {
            return Err(Error::Precondition("A ∪ B must cover all vertices".into()));
        }
        for (u, v) in host.edges() {
            let cross = (self.a.contains(u) && !self.b.contains(u) && self.b.contains(v) && !self.a.contains(v))
                || (self.a.contains(v) && !self.b.contains(v) && self.b.contains(u) && !self.a.contains(u));
            if cross {
                return Err(Error::Precondition(format!(
                    "edge {u}-{v} crosses from A−B to B−A"
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn boundary(&self) -> VertexSet {
        self.a.intersection(&self.b).cloned().collect()
    }

    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }

    pub fn flipped(&self) -> Separation {
        Separation {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

fn side_mask(g: &Multigraph, s: &Separation) -> Result<(u64, u64)> {
    Ok((g.to_mask(&s.a)?, g.to_mask(&s.b)?))
}

/// Breadth plus per-vertex flags for every boundary vertex, canonical order.
pub fn breadth_of(g: &Multigraph, s: &Separation) -> Result<(Breadth, Vec<BoundaryFlags>)> {
    let (am, bm) = side_mask(g, s)?;
    let view = g.view();
    let a_only = am & !bm;
    let b_only = bm & !am;
    let mut flags = Vec::new();
    let mut thickness = 0;
    for v in s.boundary() {
        let vi = g.vertex_index(&v)?;
        let ia = view.edges_into(vi, a_only);
        let ib = view.edges_into(vi, b_only);
        let pointed = ia <= 1;
        let anti = ib <= 1;
        if !pointed {
            thickness += 1;
        }
        flags.push(BoundaryFlags {
            vertex: v,
            edges_into_a: ia,
            edges_into_b: ib,
            pointed,
            anti_pointed: anti,
            doubly_pointed: pointed && anti,
        });
    }
    Ok((
        Breadth {
            order: s.order(),
            thickness,
        },
        flags,
    ))
}

pub fn is_pointed(g: &Multigraph, s: &Separation, v: &str) -> Result<bool> {
    let (am, bm) = side_mask(g, s)?;
    let vi = g.vertex_index(v)?;
    Ok(g.view().edges_into(vi, am & !bm) <= 1)
}

pub fn is_anti_pointed(g: &Multigraph, s: &Separation, v: &str) -> Result<bool> {
    let (am, bm) = side_mask(g, s)?;
    let vi = g.vertex_index(v)?;
    Ok(g.view().edges_into(vi, bm & !am) <= 1)
}

/// True iff every vertex of A ∩ B − Z is pointed.
pub fn is_pseudo_edge_cut(g: &Multigraph, s: &Separation, z: &VertexSet) -> Result<bool> {
    let (_, flags) = breadth_of(g, s)?;
    Ok(flags.iter().all(|f| z.contains(&f.vertex) || f.pointed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparationPredicates {
    pub separates: bool,
    pub weakly_separates: bool,
    pub strongly_separates: bool,
}

/// The three separation predicates for subsets `x`, `y`.
pub fn separation_predicates(
    g: &Multigraph,
    s: &Separation,
    x: &VertexSet,
    y: &VertexSet,
) -> Result<SeparationPredicates> {
    let boundary = s.boundary();
    let sub = |p: &VertexSet, q: &VertexSet| p.iter().all(|v| q.contains(v));
    let oriented = (sub(x, &s.a) && sub(y, &s.b)) || (sub(x, &s.b) && sub(y, &s.a));
    let separates = !sub(x, &boundary) && !sub(y, &boundary) && oriented;
    let weakly = oriented;
    let strongly = if sub(x, &s.a) && sub(y, &s.b) {
        let xy: VertexSet = x.intersection(y).cloned().collect();
        let (_, flags) = breadth_of(g, s)?;
        flags
            .iter()
            .all(|f| xy.contains(&f.vertex) || (f.pointed && !x.contains(&f.vertex)))
    } else {
        false
    };
    Ok(SeparationPredicates {
        separates,
        weakly_separates: weakly,
        strongly_separates: strongly,
    })
}

/// The reflection of `s2` with respect to `z`, `w`:
/// A1 = A2 − (A2∩B2 − (W∪Z)), B1 = B2 ∪ {u ∈ A2−B2 adjacent to A2∩B2 − (W∪Z)}.
pub fn reflection(g: &Multigraph, s2: &Separation, z: &VertexSet, w: &VertexSet) -> Result<Separation> {
    let boundary = s2.boundary();
    for v in z {
        if !boundary.contains(v) {
            return Err(Error::Precondition(format!("Z vertex `{v}` is not in A2 ∩ B2")));
        }
    }
    let (_, flags) = breadth_of(g, s2)?;
    for f in &flags {
        if !z.contains(&f.vertex) && !f.pointed {
            return Err(Error::Precondition(format!(
                "vertex `{}` in A2 ∩ B2 − Z is not pointed",
                f.vertex
            )));
        }
    }
    let mut wz: VertexSet = w.union(z).cloned().collect();
    wz = wz.intersection(&boundary).cloned().collect();
    let removed: VertexSet = boundary.difference(&wz).cloned().collect();
    for v in w {
        let f = flags
            .iter()
            .find(|f| &f.vertex == v)
            .ok_or_else(|| Error::Precondition(format!("W vertex `{v}` is not in A2 ∩ B2")))?;
        if !f.doubly_pointed {
            return Err(Error::Precondition(format!("W vertex `{v}` is not doubly pointed")));
        }
        for (x, y) in g.edges() {
            let adj = (x == v && removed.contains(y)) || (y == v && removed.contains(x));
            if adj {
                return Err(Error::Precondition(format!(
                    "W vertex `{v}` is adjacent to boundary vertex outside W ∪ Z"
                )));
            }
        }
    }
    let a1: VertexSet = s2.a.difference(&removed).cloned().collect();
    let mut b1 = s2.b.clone();
    for u in s2.a.difference(&s2.b) {
        let touches = g.edges().iter().any(|(x, y)| {
            (x == u && removed.contains(y)) || (y == u && removed.contains(x))
        });
        if touches {
            b1.insert(u.clone());
        }
    }
    let s1 = Separation::new(g, a1, b1)?;
    let common: VertexSet = s1.boundary().intersection(&boundary).cloned().collect();
    if common != wz {
        return Err(Error::Internal(format!(
            "reflection boundary mismatch: expected {wz:?}, got {common:?}"
        )));
    }
    Ok(s1)
}

/// All separations of `g` with order at most `max_order`, in canonical order.
/// Each is a pair (separator S = A∩B, side assignment of the components of
/// G − S); both orientations are produced.
pub fn enumerate_separations(g: &Multigraph, max_order: usize) -> Result<Vec<Separation>> {
    let n = g.n();
    if n > 20 {
        return Err(Error::SizeGuard {
            what: "separation enumeration",
            size: n,
            limit: 20,
        });
    }
    let view = g.view();
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    for sep_mask in 0u64..(1u64 << n) {
        if (sep_mask.count_ones() as usize) > max_order {
            continue;
        }
        let comps = view.components_within(full & !sep_mask);
        let c = comps.len();
        for assign in 0u64..(1u64 << c) {
            let mut am = sep_mask;
            let mut bm = sep_mask;
            for (i, comp) in comps.iter().enumerate() {
                if assign & (1 << i) != 0 {
                    am |= comp;
                } else {
                    bm |= comp;
                }
            }
            out.push(Separation {
                a: g.from_mask(am),
                b: g.from_mask(bm),
            });
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_of, set_of};

    fn sep(a: &[&str], b: &[&str]) -> Separation {
        Separation {
            a: a.iter().map(|s| s.to_string()).collect(),
            b: b.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn path_breadth() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let s = sep(&["a", "b"], &["b", "c"]);
        s.validate(&g).unwrap();
        let (br, flags) = breadth_of(&g, &s).unwrap();
        assert_eq!(br, Breadth { order: 1, thickness: 0 });
        assert!(flags[0].pointed && flags[0].anti_pointed);
    }

    #[test]
    fn star_pointedness() {
        let g = graph_of(&["c", "l1", "l2", "l3"], &[("c", "l1"), ("c", "l2"), ("c", "l3")]);
        let s = sep(&["c", "l1"], &["c", "l2", "l3"]);
        let (_, flags) = breadth_of(&g, &s).unwrap();
        let f = flags.iter().find(|f| f.vertex == "c").unwrap();
        assert_eq!((f.edges_into_a, f.edges_into_b), (1, 2));
        assert!(f.pointed && !f.anti_pointed);
    }

    #[test]
    fn digon_full_boundary() {
        let g = graph_of(&["u", "v"], &[("u", "v"), ("u", "v")]);
        let s = sep(&["u", "v"], &["u", "v"]);
        let (br, flags) = breadth_of(&g, &s).unwrap();
        assert_eq!(br, Breadth { order: 2, thickness: 0 });
        assert!(flags.iter().all(|f| f.doubly_pointed));
    }

    #[test]
    fn loops_count_to_neither_side() {
        let g = graph_of(&["a", "b"], &[("a", "a"), ("a", "a"), ("a", "b")]);
        let s = sep(&["a", "b"], &["b"]);
        // b is boundary; a has a loop but sits in A−B
        let (_, flags) = breadth_of(&g, &s).unwrap();
        let fb = flags.iter().find(|f| f.vertex == "b").unwrap();
        assert_eq!(fb.edges_into_a, 1);
        // now a on the boundary: loops at a must not count
        let s2 = sep(&["a", "b"], &["a"]);
        let (_, flags2) = breadth_of(&g, &s2).unwrap();
        let fa = flags2.iter().find(|f| f.vertex == "a").unwrap();
        assert_eq!(fa.edges_into_a, 1); // only the a-b edge
        assert!(fa.pointed);
    }

    #[test]
    fn pseudo_edge_cut_cases() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let s = sep(&["a", "b"], &["b", "c"]);
        assert!(is_pseudo_edge_cut(&g, &s, &set_of([])).unwrap());
        assert!(is_pseudo_edge_cut(&g, &s, &s.boundary()).unwrap());
        let k4 = graph_of(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "3"), ("1", "4"), ("2", "3"), ("2", "4"), ("3", "4")],
        );
        let s = sep(&["1", "2", "3"], &["2", "3", "4"]);
        assert!(is_pseudo_edge_cut(&k4, &s, &set_of([])).unwrap());
    }

    #[test]
    fn predicates() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let s = sep(&["a", "b"], &["b", "c"]);
        let p = separation_predicates(&g, &s, &set_of(["a"]), &set_of(["c"])).unwrap();
        assert!(p.separates && p.weakly_separates && p.strongly_separates);
        let q = separation_predicates(&g, &s, &set_of(["b"]), &set_of(["b"])).unwrap();
        assert!(!q.separates && q.weakly_separates);
        let r = separation_predicates(&g, &s, &set_of(["c"]), &set_of(["a"])).unwrap();
        assert!(!r.strongly_separates && r.separates);
    }

    #[test]
    fn reflection_path() {
        let g = graph_of(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]);
        let s2 = sep(&["a", "b"], &["b", "c", "d"]);
        let s1 = reflection(&g, &s2, &set_of([]), &set_of([])).unwrap();
        assert_eq!(s1, sep(&["a"], &["a", "b", "c", "d"]));
        assert!(is_anti_pointed(&g, &s1, "a").unwrap());
        // boundary fully in W ∪ Z: identity
        let id = reflection(&g, &s2, &set_of(["b"]), &set_of([])).unwrap();
        assert_eq!(id, s2);
        let digon = graph_of(&["u", "v"], &[("u", "v"), ("u", "v")]);
        let s = sep(&["u", "v"], &["u", "v"]);
        let r = reflection(&digon, &s, &set_of(["u", "v"]), &set_of([])).unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn enumeration_counts() {
        let g = graph_of(&["a"], &[]);
        let seps = enumerate_separations(&g, 1).unwrap();
        // ({a},∅), (∅,{a}), ({a},{a})
        assert_eq!(seps.len(), 3);
        let e = graph_of(&[], &[]);
        assert_eq!(enumerate_separations(&e, 0).unwrap().len(), 1);
    }
}
