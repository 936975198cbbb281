//! Finite quasi-orders and the Higman subsequence comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite quasi-order given by its ground set and relation pairs. Must be
/// reflexive and transitive; [`validate_quasi_order`] checks both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuasiOrder {
    pub elements: Vec<String>,
    pub leq: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OrderViolation {
    UnknownElement(String),
    MissingReflexive(String),
    MissingTransitive(String, String, String),
}

impl FiniteQuasiOrder {
    /// The discrete order: reflexive pairs only.
    pub fn discrete(elements: &[&str]) -> Self {
        FiniteQuasiOrder {
            elements: elements.iter().map(|s| s.to_string()).collect(),
            leq: elements.iter().map(|s| (s.to_string(), s.to_string())).collect(),
        }
    }

    pub fn trivial() -> Self {
        Self::discrete(&["*"])
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn contains(&self, e: &str) -> bool {
        self.elements.iter().any(|x| x == e)
    }

    pub fn leq(&self, a: &str, b: &str) -> Result<bool> {
        for e in [a, b] {
            if !self.contains(e) {
                return Err(Error::Precondition(format!("`{e}` is not in the quasi-order")));
            }
        }
        Ok(self.leq.contains(&(a.to_string(), b.to_string())))
    }
}

/// Exhaustive reflexivity and transitivity check.
pub fn validate_quasi_order(q: &FiniteQuasiOrder) -> std::result::Result<(), OrderViolation> {
    for (a, b) in &q.leq {
        for e in [a, b] {
            if !q.contains(e) {
                return Err(OrderViolation::UnknownElement(e.clone()));
            }
        }
    }
    for e in &q.elements {
        if !q.leq.contains(&(e.clone(), e.clone())) {
            return Err(OrderViolation::MissingReflexive(e.clone()));
        }
    }
    for (a, b) in &q.leq {
        for (c, d) in &q.leq {
            if b == c && !q.leq.contains(&(a.clone(), d.clone())) {
                return Err(OrderViolation::MissingTransitive(a.clone(), b.clone(), d.clone()));
            }
        }
    }
    Ok(())
}

/// Higman's subsequence comparison: A ≤' B iff a dominating subsequence
/// embedding exists. Greedy earliest-match is exact for this relation.
pub fn higman_leq(a: &[String], b: &[String], q: &FiniteQuasiOrder) -> Result<bool> {
    for e in a.iter().chain(b.iter()) {
        if !q.contains(e) {
            return Err(Error::Precondition(format!("`{e}` is not in the quasi-order")));
        }
    }
    let mut j = 0usize;
    'outer: for x in a {
        while j < b.len() {
            let ok = q.leq(x, &b[j])?;
            j += 1;
            if ok {
                continue 'outer;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let q = FiniteQuasiOrder::discrete(&["a", "b"]);
        assert!(validate_quasi_order(&q).is_ok());
        let mut missing = q.clone();
        missing.leq.remove(&("a".into(), "a".into()));
        assert_eq!(
            validate_quasi_order(&missing),
            Err(OrderViolation::MissingReflexive("a".into()))
        );
        let mut intrans = FiniteQuasiOrder::discrete(&["a", "b", "c"]);
        intrans.leq.insert(("a".into(), "b".into()));
        intrans.leq.insert(("b".into(), "c".into()));
        assert!(matches!(
            validate_quasi_order(&intrans),
            Err(OrderViolation::MissingTransitive(..))
        ));
    }

    #[test]
    fn higman_basics() {
        let q = FiniteQuasiOrder::discrete(&["a", "b"]);
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(higman_leq(&s(&[]), &s(&["a"]), &q).unwrap());
        assert!(higman_leq(&s(&["a", "b"]), &s(&["a", "b"]), &q).unwrap());
        assert!(!higman_leq(&s(&["a", "a"]), &s(&["a", "b"]), &q).unwrap());
        assert!(higman_leq(&s(&["a", "b"]), &s(&["b", "a", "a", "b"]), &q).unwrap());
        assert!(!higman_leq(&s(&["b", "a"]), &s(&["a"]), &q).unwrap());
    }

    #[test]
    fn higman_matches_exhaustive() {
        use rand::{Rng, SeedableRng};
        let mut q = FiniteQuasiOrder::discrete(&["a", "b", "c", "d"]);
        q.leq.insert(("a".into(), "b".into()));
        q.leq.insert(("c".into(), "d".into()));
        assert!(validate_quasi_order(&q).is_ok());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| -> Vec<String> {
            (0..len)
                .map(|_| ["a", "b", "c", "d"][rng.gen_range(0..4)].to_string())
                .collect()
        };
        for _ in 0..400 {
            let la = rng.gen_range(0..=6);
            let a = pick(&mut rng, la);
            let lb = rng.gen_range(0..=6);
            let b = pick(&mut rng, lb);
            let fast = higman_leq(&a, &b, &q).unwrap();
            let slow = crate::oracle::higman_exhaustive(&a, &b, &|x, y| {
                q.leq(x, y).unwrap()
            });
            assert_eq!(fast, slow, "a={a:?} b={b:?}");
        }
    }
}
