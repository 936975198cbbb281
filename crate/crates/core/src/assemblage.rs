//! Q-assemblages: rooted graphs with march multisets labelled into a finite
//! quasi-order, their branches and encodings, and the simulation order.
//!
//! Derived orders arising from encodings are represented lazily: a branch
//! label carries the whole branch assemblage and its adjacency vector, and
//! comparing two branch labels runs a nested simulation search, memoized by
//! canonical serialization.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decomp::{up_down, validate, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};
use crate::quasiorder::FiniteQuasiOrder;
use crate::topo::{Embedding, March};

/// A label: either a base quasi-order element, or a lazily compared branch
/// pair (branch assemblage, adjacency bits).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Base(String),
    Branch(Box<BranchLabel>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchLabel {
    pub assemblage: QAssemblage,
    pub bits: Vec<u8>,
}

impl Label {
    pub fn base(s: &str) -> Self {
        Label::Base(s.to_string())
    }
}

/// A rooted graph with a finite multiset of marches, labelled into a quasi-
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAssemblage {
    pub graph: Multigraph,
    pub gamma0: March,
    #[serde(rename = "Gamma")]
    pub gammas: Vec<March>,
    pub f: Vec<Label>,
    pub phi: BTreeMap<String, Label>,
    pub order: FiniteQuasiOrder,
}

impl QAssemblage {
    pub fn validate(&self) -> Result<()> {
        self.gamma0.validate()?;
        for v in &self.gamma0.vertices {
            self.graph.vertex_index(v)?;
        }
        if self.gammas.len() != self.f.len() {
            return Err(Error::Parse("one f label per march".into()));
        }
        for m in &self.gammas {
            m.validate()?;
            for v in &m.vertices {
                self.graph.vertex_index(v)?;
            }
        }
        for v in self.graph.vertices() {
            if !self.phi.contains_key(v) {
                return Err(Error::Parse(format!("phi misses vertex `{v}`")));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let s: QAssemblage = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn canon(&self) -> String {
        serde_json::to_string(self).expect("assemblage serialization cannot fail")
    }
}

/// A rooted tree-decomposition of an assemblage: the root march lies in the
/// root bag, and each march is anchored at a node whose bag contains it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchoredDecomposition {
    #[serde(rename = "td")]
    pub decomp: RootedDecomposition,
    /// anchor node per march, parallel to the assemblage's Gamma
    pub alpha: Vec<String>,
}

impl AnchoredDecomposition {
    pub fn validate(&self, s: &QAssemblage) -> Result<()> {
        if let Err(v) = validate(&s.graph, &self.decomp) {
            return Err(Error::Precondition(format!("not a tree-decomposition: {v:?}")));
        }
        let root_bag = self.decomp.bag(self.decomp.root())?;
        for v in &s.gamma0.vertices {
            if !root_bag.contains(v) {
                return Err(Error::Precondition(format!(
                    "root march vertex `{v}` missing from the root bag"
                )));
            }
        }
        if self.alpha.len() != s.gammas.len() {
            return Err(Error::Precondition("one anchor per march".into()));
        }
        for (m, t) in s.gammas.iter().zip(&self.alpha) {
            let bag = self.decomp.bag(t)?;
            for v in &m.vertices {
                if !bag.contains(v) {
                    return Err(Error::Precondition(format!(
                        "march vertex `{v}` missing from the bag at its anchor `{t}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The essential number assigned to a bag-intersection vertex of a non-root
/// node's branch march.
pub fn essential_number(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    t: &str,
    v: &str,
) -> Result<u8> {
    let ud = up_down(&ad.decomp, t)?;
    let anchored_outside = s
        .gammas
        .iter()
        .zip(&ad.alpha)
        .any(|(m, a)| m.vertices.iter().any(|x| x == v) && !ad.decomp.is_ancestor(t, a).unwrap_or(false));
    let out_edges = s
        .graph
        .edges()
        .iter()
        .filter(|(x, y)| {
            (x == v && !ud.up.contains(y)) || (y == v && !ud.up.contains(x) && x != y)
        })
        .count();
    let g0 = s.gamma0.position(v).map(|i| s.gamma0.ess[i]);
    let quiet0 = matches!(g0, None | Some(0));
    let num = if !anchored_outside && out_edges == 0 && quiet0 {
        0
    } else if !anchored_outside
        && ((out_edges == 1 && quiet0) || (out_edges == 0 && g0 == Some(1)))
    {
        1
    } else {
        2
    };
    Ok(num)
}

/// The branch at a non-root node: the sub-assemblage induced above `t`, with
/// the bag-intersection march ordered by `pi`.
pub fn branch_at(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    t: &str,
    pi: &[String],
) -> Result<QAssemblage> {
    let p = ad
        .decomp
        .parent_of(t)
        .ok_or_else(|| Error::Precondition("branches exist at non-root nodes only".into()))?
        .clone();
    let shared: VertexSet = ad
        .decomp
        .bag(t)?
        .intersection(ad.decomp.bag(&p)?)
        .cloned()
        .collect();
    let pi_set: VertexSet = pi.iter().cloned().collect();
    if pi_set != shared || pi.len() != shared.len() {
        return Err(Error::Precondition(
            "the ordering must be a permutation of the bag intersection".into(),
        ));
    }
    let mut ess = Vec::new();
    for v in pi {
        ess.push(essential_number(s, ad, t, v)?);
    }
    let gamma_t = March::new(pi.to_vec(), ess)?;
    let ud = up_down(&ad.decomp, t)?;
    let mut gammas = Vec::new();
    let mut f = Vec::new();
    for ((m, lbl), a) in s.gammas.iter().zip(&s.f).zip(&ad.alpha) {
        if ad.decomp.is_ancestor(t, a)? {
            gammas.push(m.clone());
            f.push(lbl.clone());
        }
    }
    let phi: BTreeMap<String, Label> = s
        .phi
        .iter()
        .filter(|(v, _)| ud.up.contains(*v))
        .map(|(v, l)| (v.clone(), l.clone()))
        .collect();
    Ok(QAssemblage {
        graph: s.graph.induced(&ud.up),
        gamma0: gamma_t,
        gammas,
        f,
        phi,
        order: s.order.clone(),
    })
}

/// Per-index adjacency bits of the branch march: 1 iff the entry has a
/// neighbor above `t` outside the march.
pub fn b_sequence(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    t: &str,
    pi: &[String],
) -> Result<Vec<u8>> {
    let branch = branch_at(s, ad, t, pi)?;
    let ud = up_down(&ad.decomp, t)?;
    let march_set: VertexSet = branch.gamma0.vertices.iter().cloned().collect();
    let mut bits = Vec::new();
    for v in &branch.gamma0.vertices {
        let adj = s.graph.edges().iter().any(|(x, y)| {
            let other = if x == v {
                y
            } else if y == v {
                x
            } else {
                return false;
            };
            ud.up.contains(other) && !march_set.contains(other) && other != v
        });
        bits.push(adj as u8);
    }
    Ok(bits)
}

/// Anchors per node for the encoding; orderings are supplied per non-root
/// node (for its own march) and consulted for every child.
pub fn encoding_at(
    s: &QAssemblage,
    ad: &AnchoredDecomposition,
    t: &str,
    orderings: &BTreeMap<String, Vec<String>>,
) -> Result<QAssemblage> {
    let gamma_h = if t == ad.decomp.root() {
        s.gamma0.clone()
    } else {
        let pi = orderings
            .get(t)
            .ok_or_else(|| Error::Precondition(format!("missing ordering for `{t}`")))?;
        branch_at(s, ad, t, pi)?.gamma0
    };
    let bag = ad.decomp.bag(t)?.clone();
    let mut gammas = Vec::new();
    let mut f = Vec::new();
    let mut children = ad.decomp.children_of(t);
    children.sort();
    for c in children {
        let pi = orderings
            .get(c)
            .ok_or_else(|| Error::Precondition(format!("missing ordering for child `{c}`")))?;
        let branch = branch_at(s, ad, c, pi)?;
        let bits = b_sequence(s, ad, c, pi)?;
        gammas.push(branch.gamma0.clone());
        f.push(Label::Branch(Box::new(BranchLabel {
            assemblage: branch,
            bits,
        })));
    }
    for ((m, lbl), a) in s.gammas.iter().zip(&s.f).zip(&ad.alpha) {
        if a == t {
            gammas.push(m.clone());
            f.push(lbl.clone());
        }
    }
    let phi: BTreeMap<String, Label> = s
        .phi
        .iter()
        .filter(|(v, _)| bag.contains(*v))
        .map(|(v, l)| (v.clone(), l.clone()))
        .collect();
    Ok(QAssemblage {
        graph: s.graph.induced(&bag),
        gamma0: gamma_h,
        gammas,
        f,
        phi,
        order: s.order.clone(),
    })
}

/// Witness of one assemblage simulating another: the rooted embedding on the
/// rooted extensions plus the march injection (index into the big Γ per
/// small Γ index).
#[derive(Debug, Clone)]
pub struct SimWitness {
    pub embedding: Embedding,
    pub iota: Vec<usize>,
}

struct SimCtx {
    memo: RefCell<HashMap<(String, String), bool>>,
    deadline: Option<Instant>,
    fault: RefCell<Option<Error>>,
}

fn label_leq(a: &Label, b: &Label, order: &FiniteQuasiOrder, ctx: &SimCtx) -> Result<bool> {
    match (a, b) {
        (Label::Base(x), Label::Base(y)) => order.leq(x, y),
        (Label::Branch(p), Label::Branch(q)) => {
            if p.bits != q.bits {
                return Ok(false);
            }
            sim_cached(&p.assemblage, &q.assemblage, ctx)
        }
        _ => Ok(false),
    }
}

fn sim_cached(small: &QAssemblage, big: &QAssemblage, ctx: &SimCtx) -> Result<bool> {
    let key = (small.canon(), big.canon());
    if let Some(&v) = ctx.memo.borrow().get(&key) {
        return Ok(v);
    }
    let v = simulates_inner(small, big, ctx)?.is_some();
    ctx.memo.borrow_mut().insert(key, v);
    Ok(v)
}

/// Maximum bipartite matching by augmenting paths over candidate pairs.
fn full_matching(n_small: usize, n_big: usize, ok: &[Vec<bool>]) -> Option<Vec<usize>> {
    if n_small > n_big {
        return None;
    }
    let mut match_big: Vec<Option<usize>> = vec![None; n_big];
    fn try_assign(
        i: usize,
        ok: &[Vec<bool>],
        seen: &mut [bool],
        match_big: &mut [Option<usize>],
    ) -> bool {
        for j in 0..seen.len() {
            if ok[i][j] && !seen[j] {
                seen[j] = true;
                if match_big[j].is_none() || try_assign(match_big[j].unwrap(), ok, seen, match_big) {
                    match_big[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n_small {
        let mut seen = vec![false; n_big];
        if !try_assign(i, ok, &mut seen, &mut match_big) {
            return None;
        }
    }
    let mut iota = vec![usize::MAX; n_small];
    for (j, m) in match_big.iter().enumerate() {
        if let Some(i) = m {
            iota[*i] = j;
        }
    }
    Some(iota)
}

fn simulates_inner(
    small: &QAssemblage,
    big: &QAssemblage,
    ctx: &SimCtx,
) -> Result<Option<SimWitness>> {
    if small.order != big.order {
        return Err(Error::Precondition("assemblages over different base orders".into()));
    }
    if small.gamma0.len() != big.gamma0.len() || small.gammas.len() > big.gammas.len() {
        return Ok(None);
    }
    let phi_ok = |hv: &str, gv: &str| -> bool {
        let (Some(a), Some(b)) = (small.phi.get(hv), big.phi.get(gv)) else {
            return false;
        };
        match label_leq(a, b, &small.order, ctx) {
            Ok(v) => v,
            Err(e) => {
                ctx.fault.borrow_mut().get_or_insert(e);
                false
            }
        }
    };
    let result: RefCell<Option<SimWitness>> = RefCell::new(None);
    let visit = |e: &Embedding| -> Result<bool> {
        // march injection: vertex-sequence equality plus label domination
        let n_s = small.gammas.len();
        let n_b = big.gammas.len();
        let mut ok = vec![vec![false; n_b]; n_s];
        for (i, m) in small.gammas.iter().enumerate() {
            let Some(img) = e.map_march(m) else { continue };
            for (j, m2) in big.gammas.iter().enumerate() {
                if img.vertices != m2.vertices {
                    continue;
                }
                if label_leq(&small.f[i], &big.f[j], &small.order, ctx)? {
                    ok[i][j] = true;
                }
            }
        }
        if let Some(iota) = full_matching(n_s, n_b, &ok) {
            *result.borrow_mut() = Some(SimWitness {
                embedding: e.clone(),
                iota,
            });
            return Ok(true);
        }
        Ok(false)
    };
    let mut visit = visit;
    let found = crate::topo::search_rooted_embeddings(
        (&small.graph, &small.gamma0),
        (&big.graph, &big.gamma0),
        Some(&phi_ok),
        ctx.deadline,
        &mut visit,
    )?;
    if let Some(e) = ctx.fault.borrow_mut().take() {
        return Err(e);
    }
    let _ = found;
    Ok(result.into_inner())
}

/// Searches for a witness that `big` simulates `small`: a rooted embedding
/// respecting φ plus a march injection with vertex-sequence equality and
/// f-label domination.
pub fn find_simulation(small: &QAssemblage, big: &QAssemblage) -> Result<Option<SimWitness>> {
    find_simulation_with_deadline(small, big, None)
}

pub fn find_simulation_with_deadline(
    small: &QAssemblage,
    big: &QAssemblage,
    deadline: Option<Instant>,
) -> Result<Option<SimWitness>> {
    small.validate()?;
    big.validate()?;
    let ctx = SimCtx {
        memo: RefCell::new(HashMap::new()),
        deadline,
        fault: RefCell::new(None),
    };
    simulates_inner(small, big, &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_of;

    fn simple_assemblage(g: Multigraph, gamma0: March, gammas: Vec<March>) -> QAssemblage {
        let order = FiniteQuasiOrder::trivial();
        let phi = g
            .vertices()
            .iter()
            .map(|v| (v.clone(), Label::base("*")))
            .collect();
        let f = gammas.iter().map(|_| Label::base("*")).collect();
        QAssemblage {
            graph: g,
            gamma0,
            gammas,
            f,
            phi,
            order,
        }
    }

    fn anchored(s: &QAssemblage, json: &str, alpha: &[&str]) -> AnchoredDecomposition {
        let ad = AnchoredDecomposition {
            decomp: RootedDecomposition::parse(json).unwrap(),
            alpha: alpha.iter().map(|s| s.to_string()).collect(),
        };
        ad.validate(s).unwrap();
        ad
    }

    #[test]
    fn simulation_reflexive() {
        let g = graph_of(&["a", "b"], &[("a", "b")]);
        let s = simple_assemblage(
            g,
            March::new(vec!["a".into()], vec![1]).unwrap(),
            vec![March::new(vec!["b".into()], vec![2]).unwrap()],
        );
        let w = find_simulation(&s, &s).unwrap().expect("reflexive");
        assert_eq!(w.iota, vec![0]);
    }

    #[test]
    fn simulation_counting_and_mismatch() {
        let g = graph_of(&["a"], &[]);
        let one = simple_assemblage(g.clone(), March::empty(), vec![]);
        let two = simple_assemblage(
            g.clone(),
            March::empty(),
            vec![March::new(vec!["a".into()], vec![0]).unwrap()],
        );
        // |Γ| too large on the small side: no injection
        assert!(find_simulation(&two, &one).unwrap().is_none());
        assert!(find_simulation(&one, &two).unwrap().is_some());
        // root march length mismatch
        let rooted = simple_assemblage(g, March::new(vec!["a".into()], vec![0]).unwrap(), vec![]);
        assert!(find_simulation(&rooted, &one).unwrap().is_none());
    }

    #[test]
    fn branch_essential_numbers() {
        // path a-b-c with bags {a,b},{b,c}: at the child, b has one edge
        // down (to a), c has none
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let s = simple_assemblage(g, March::empty(), vec![]);
        let ad = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"]},"edges":[["t1","t2"]]}"#,
            &[],
        );
        let br = branch_at(&s, &ad, "t2", &["b".to_string()]).unwrap();
        assert_eq!(br.gamma0.vertices, vec!["b"]);
        assert_eq!(br.gamma0.ess, vec![1]);
        assert_eq!(br.graph.vertex_set(), crate::graph::set_of(["b", "c"]));
        let bits = b_sequence(&s, &ad, "t2", &["b".to_string()]).unwrap();
        assert_eq!(bits, vec![1]); // b adjacent to c above
    }

    #[test]
    fn branch_gamma_anchor_cases() {
        // march anchored at the root makes its vertices essential 2 below
        let g = graph_of(&["a", "b"], &[("a", "b")]);
        let m = March::new(vec!["b".into()], vec![0]).unwrap();
        let s = simple_assemblage(g, March::empty(), vec![m]);
        let ad = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b"]},"edges":[["t1","t2"]]}"#,
            &["t1"],
        );
        let br = branch_at(&s, &ad, "t2", &["b".to_string()]).unwrap();
        assert_eq!(br.gamma0.ess, vec![2]);
        assert!(br.gammas.is_empty());
        // anchored below instead: the march travels with the branch
        let ad2 = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b"]},"edges":[["t1","t2"]]}"#,
            &["t2"],
        );
        let br2 = branch_at(&s, &ad2, "t2", &["b".to_string()]).unwrap();
        assert_eq!(br2.gammas.len(), 1);
        // one edge leaves the subtree at b, no root-march involvement
        assert_eq!(br2.gamma0.ess, vec![1]);
    }

    #[test]
    fn branch_of_branch_identity() {
        // chain of three bags; the branch at the grandchild computed inside
        // the branch at the child equals the one computed globally
        let g = graph_of(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]);
        let m = March::new(vec!["d".into()], vec![2]).unwrap();
        let s = simple_assemblage(
            g,
            March::new(vec!["a".into()], vec![1]).unwrap(),
            vec![m],
        );
        let ad = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"],"t3":["c","d"]},
                "edges":[["t1","t2"],["t2","t3"]]}"#,
            &["t3"],
        );
        let pi_t2 = vec!["b".to_string()];
        let pi_t3 = vec!["c".to_string()];
        let big = branch_at(&s, &ad, "t3", &pi_t3).unwrap();
        let mid = branch_at(&s, &ad, "t2", &pi_t2).unwrap();
        let sub_ad = AnchoredDecomposition {
            decomp: RootedDecomposition::parse(
                r#"{"root":"t2","bags":{"t2":["b","c"],"t3":["c","d"]},"edges":[["t2","t3"]]}"#,
            )
            .unwrap(),
            alpha: vec!["t3".into()],
        };
        sub_ad.validate(&mid).unwrap();
        let nested = branch_at(&mid, &sub_ad, "t3", &pi_t3).unwrap();
        assert_eq!(nested, big);
    }

    #[test]
    fn encoding_shapes() {
        let g = graph_of(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let m = March::new(vec!["a".into()], vec![1]).unwrap();
        let s = simple_assemblage(g, March::empty(), vec![m]);
        let ad = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b","c"]},"edges":[["t1","t2"]]}"#,
            &["t1"],
        );
        let mut ords = BTreeMap::new();
        ords.insert("t2".to_string(), vec!["b".to_string()]);
        let enc = encoding_at(&s, &ad, "t1", &ords).unwrap();
        // Λ1 carries the child branch, Λ2 the anchored march
        assert_eq!(enc.gammas.len(), 2);
        assert!(matches!(enc.f[0], Label::Branch(_)));
        assert!(matches!(enc.f[1], Label::Base(_)));
        assert_eq!(enc.graph.vertex_set(), crate::graph::set_of(["a", "b"]));
        // leaf encoding has no Λ1
        let leaf = encoding_at(&s, &ad, "t2", &ords).unwrap();
        assert!(leaf.gammas.is_empty());
    }

    #[test]
    fn duplicate_marches_kept() {
        let g = graph_of(&["a", "b"], &[("a", "b")]);
        let m = March::new(vec!["b".into()], vec![1]).unwrap();
        let s = simple_assemblage(g, March::empty(), vec![m.clone(), m]);
        let ad = anchored(
            &s,
            r#"{"root":"t1","bags":{"t1":["a","b"],"t2":["b"]},"edges":[["t1","t2"]]}"#,
            &["t1", "t1"],
        );
        let enc = encoding_at(&s, &ad, "t1", &{
            let mut o = BTreeMap::new();
            o.insert("t2".to_string(), vec!["b".to_string()]);
            o
        })
        .unwrap();
        assert_eq!(enc.gammas.len(), 3); // one branch + both duplicates
    }
}
